// Copyright 2026 The crowdsdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Plain CSV readers and writers for the library's value types.

#ifndef CROWDSDP_CSV_IO_H_
#define CROWDSDP_CSV_IO_H_

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crowdsdp/estimators.h"
#include "crowdsdp/model.h"
#include "crowdsdp/pipeline.h"
#include "crowdsdp/sdp.h"

namespace crowdsdp {

// Splits one CSV line on commas and trims surrounding blanks. No quoting.
std::vector<std::string> SplitCsvLine(const std::string& line);

// d lines of d comma-separated decimals.
void WriteReliabilityCsv(std::ostream& out, const ReliabilityMatrix& q);
ReliabilityMatrix ReadReliabilityCsv(std::istream& in);

// Line 1: mu. Line 2: nu.
void WritePriorsCsv(std::ostream& out, const TypePriors& priors);
TypePriors ReadPriorsCsv(std::istream& in);

// Header "task_id,label,margin".
void WriteLabelEstimateCsv(std::ostream& out, const LabelEstimate& est);
LabelEstimate ReadLabelEstimateCsv(std::istream& in);

// n lines of n integers.
void WriteSimilarityCsv(std::ostream& out, const SimilarityMatrix& a);
Eigen::MatrixXi ReadIntMatrixCsv(std::istream& in);

// n lines of n decimals, 9 significant digits.
void WriteMatrixCsv(std::ostream& out, const Eigen::MatrixXd& x);
Eigen::MatrixXd ReadMatrixCsv(std::istream& in);

// Header "task_id,worker_id,cluster_id". Pilot queries carry cluster_id -1.
void WriteAssignmentPlanCsv(std::ostream& out, const AssignmentPlan& plan,
                            int n);

// Header "task_id,worker_id,answer".
void WriteResponsesCsv(std::ostream& out, const ResponseSet& responses);
// m and n are taken as one past the largest ids unless given.
ResponseSet ReadResponsesCsv(std::istream& in, int m = -1, int n = -1);

}  // namespace crowdsdp

#endif  // CROWDSDP_CSV_IO_H_
