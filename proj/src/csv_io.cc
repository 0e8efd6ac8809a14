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

#include "crowdsdp/csv_io.h"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "crowdsdp/error.h"

namespace crowdsdp {
namespace {

using internal::Require;

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double ParseDouble(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    Require(used == s.size(), "malformed number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError("malformed number '" + s + "'");
  }
}

long long ParseInt(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    Require(used == s.size(), "malformed integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError("malformed integer '" + s + "'");
  }
}

// Non-blank lines, split.
std::vector<std::vector<std::string>> ReadRows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    rows.push_back(SplitCsvLine(line));
  }
  return rows;
}

bool IsHeader(const std::vector<std::string>& row) {
  return !row.empty() && !row[0].empty() &&
         !(std::isdigit(static_cast<unsigned char>(row[0][0])) ||
           row[0][0] == '-' || row[0][0] == '+' || row[0][0] == '.');
}

Eigen::MatrixXd ToMatrix(const std::vector<std::vector<std::string>>& rows) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index cols = n == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd x(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    Require(static_cast<Eigen::Index>(rows[i].size()) == cols,
            "ragged matrix row " + std::to_string(i));
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = ParseDouble(rows[i][j]);
  }
  return x;
}

void WriteRow(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (j > 0) out << ',';
    out << v[j];
  }
  out << '\n';
}

}  // namespace

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void WriteReliabilityCsv(std::ostream& out, const ReliabilityMatrix& q) {
  out << std::setprecision(17);
  for (int t = 0; t < q.d(); ++t) WriteRow(out, q.matrix().row(t).transpose());
}

ReliabilityMatrix ReadReliabilityCsv(std::istream& in) {
  return ReliabilityMatrix(ToMatrix(ReadRows(in)));
}

void WritePriorsCsv(std::ostream& out, const TypePriors& priors) {
  out << std::setprecision(17);
  WriteRow(out, priors.mu());
  WriteRow(out, priors.nu());
}

TypePriors ReadPriorsCsv(std::istream& in) {
  auto rows = ReadRows(in);
  Require(rows.size() == 2, "priors file must have exactly two lines");
  Eigen::MatrixXd x = ToMatrix(rows);
  return TypePriors(x.row(0).transpose(), x.row(1).transpose());
}

void WriteLabelEstimateCsv(std::ostream& out, const LabelEstimate& est) {
  out << "task_id,label,margin\n" << std::setprecision(17);
  for (int i = 0; i < est.m(); ++i) {
    out << i << ',' << est.labels[i] << ',' << est.margins[i] << '\n';
  }
}

LabelEstimate ReadLabelEstimateCsv(std::istream& in) {
  auto rows = ReadRows(in);
  if (!rows.empty() && IsHeader(rows[0])) rows.erase(rows.begin());
  LabelEstimate est;
  est.labels.resize(rows.size());
  est.margins.resize(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& row : rows) {
    Require(row.size() == 3, "label rows need task_id,label,margin");
    const long long i = ParseInt(row[0]);
    Require(i >= 0 && i < static_cast<long long>(rows.size()) && !seen[i],
            "task ids must be a permutation of 0..m-1");
    seen[i] = true;
    const long long label = ParseInt(row[1]);
    Require(label == 1 || label == -1, "labels must be +-1");
    est.labels[i] = static_cast<int>(label);
    est.margins[i] = ParseDouble(row[2]);
  }
  return est;
}

void WriteSimilarityCsv(std::ostream& out, const SimilarityMatrix& a) {
  for (int j = 0; j < a.n(); ++j) {
    for (int k = 0; k < a.n(); ++k) {
      if (k > 0) out << ',';
      out << a.a(j, k);
    }
    out << '\n';
  }
}

Eigen::MatrixXi ReadIntMatrixCsv(std::istream& in) {
  auto rows = ReadRows(in);
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index cols = n == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXi x(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    Require(static_cast<Eigen::Index>(rows[i].size()) == cols,
            "ragged matrix row " + std::to_string(i));
    for (Eigen::Index j = 0; j < cols; ++j) {
      x(i, j) = static_cast<int>(ParseInt(rows[i][j]));
    }
  }
  return x;
}

void WriteMatrixCsv(std::ostream& out, const Eigen::MatrixXd& x) {
  out << std::setprecision(9);
  for (Eigen::Index i = 0; i < x.rows(); ++i) WriteRow(out, x.row(i).transpose());
}

Eigen::MatrixXd ReadMatrixCsv(std::istream& in) { return ToMatrix(ReadRows(in)); }

void WriteAssignmentPlanCsv(std::ostream& out, const AssignmentPlan& plan,
                            int n) {
  out << "task_id,worker_id,cluster_id\n";
  for (int i = 0; i < plan.m(); ++i) {
    if (plan.is_pilot[i]) {
      for (int j = 0; j < n; ++j) out << i << ',' << j << ",-1\n";
      continue;
    }
    for (int z = 0; z < plan.k; ++z) {
      for (int j : plan.subsets[i][z]) out << i << ',' << j << ',' << z << '\n';
    }
  }
}

void WriteResponsesCsv(std::ostream& out, const ResponseSet& responses) {
  out << "task_id,worker_id,answer\n";
  for (const Response& r : responses.entries()) {
    out << r.task << ',' << r.worker << ',' << r.value << '\n';
  }
}

ResponseSet ReadResponsesCsv(std::istream& in, int m, int n) {
  auto rows = ReadRows(in);
  if (!rows.empty() && IsHeader(rows[0])) rows.erase(rows.begin());
  std::vector<Response> entries;
  entries.reserve(rows.size());
  int max_task = -1;
  int max_worker = -1;
  for (const auto& row : rows) {
    Require(row.size() == 3, "response rows need task_id,worker_id,answer");
    const int i = static_cast<int>(ParseInt(row[0]));
    const int j = static_cast<int>(ParseInt(row[1]));
    const int v = static_cast<int>(ParseInt(row[2]));
    Require(i >= 0 && j >= 0, "ids must be nonnegative");
    max_task = std::max(max_task, i);
    max_worker = std::max(max_worker, j);
    entries.push_back({i, j, v});
  }
  if (m < 0) m = max_task + 1;
  if (n < 0) n = max_worker + 1;
  return ResponseSet(m, n, std::move(entries));
}

}  // namespace crowdsdp
