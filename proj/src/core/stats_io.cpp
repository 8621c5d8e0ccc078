// SPDX-License-Identifier: Apache-2.0
//
// rsris - statistical-CSI rate splitting with RIS phase optimization
// Copyright (C) 2026 The rsris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "stats_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace rsris::io {

namespace {

[[noreturn]] void parse_error(int line, const std::string& msg) {
  throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + msg);
}

const Mat& require_matrix(const MatrixFile& f, const std::string& name) {
  auto it = f.matrices.find(name);
  if (it == f.matrices.end()) throw Error(ErrorCode::parse, "missing matrix " + name);
  return it->second;
}

}  // namespace

MatrixFile parse_matrix_file(std::istream& in) {
  MatrixFile f;
  std::string line;
  int lineno = 0;
  bool header = false, have_dims = false;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '#') continue;
      return true;
    }
    return false;
  };
  while (next_line(line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (!header) {
      int version = 0;
      if (tag != "rsris-matrices" || !(ls >> version) || version != 1)
        parse_error(lineno, "expected header 'rsris-matrices 1'");
      header = true;
      continue;
    }
    if (tag == "dims") {
      if (!(ls >> f.M >> f.K >> f.N) || f.M < 1 || f.K < 1 || f.N < 0) parse_error(lineno, "bad dims line");
      have_dims = true;
    } else if (tag == "matrix") {
      std::string name;
      long rows = -1, cols = -1;
      if (!(ls >> name >> rows >> cols) || rows < 0 || cols < 0) parse_error(lineno, "bad matrix line");
      if (f.matrices.count(name)) parse_error(lineno, "duplicate matrix " + name);
      Mat m(rows, cols);
      for (long r = 0; r < rows; ++r) {
        std::string row;
        if (!next_line(row)) parse_error(lineno, "unexpected end of file in " + name);
        std::istringstream rs(row);
        for (long c = 0; c < cols; ++c) {
          double re, im;
          if (!(rs >> re >> im)) parse_error(lineno, "short row in " + name);
          m(r, c) = cd(re, im);
        }
        std::string extra;
        if (rs >> extra) parse_error(lineno, "trailing data in row of " + name);
      }
      f.matrices.emplace(name, std::move(m));
    } else {
      parse_error(lineno, "unknown record '" + tag + "'");
    }
  }
  if (!header) throw Error(ErrorCode::parse, "empty matrix file");
  if (!have_dims) throw Error(ErrorCode::parse, "missing dims line");
  return f;
}

void write_matrix_file(std::ostream& out, const MatrixFile& file) {
  out << "rsris-matrices 1\n";
  out << "dims " << file.M << ' ' << file.K << ' ' << file.N << '\n';
  out << std::setprecision(17);
  for (const auto& [name, m] : file.matrices) {
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out << ' ';
        out << m(r, c).real() << ' ' << m(r, c).imag();
      }
      out << '\n';
    }
  }
}

model::ChannelStatistics statistics_from_file(const MatrixFile& f) {
  model::ChannelStatistics s;
  s.dims = {f.M, f.K, f.N};
  const Mat& d = require_matrix(f, "delta");
  if (d.rows() != 1 || d.cols() != 1) throw Error(ErrorCode::parse, "delta must be 1x1");
  s.delta = d(0, 0).real();
  for (int k = 0; k < f.K; ++k) {
    s.direct_cov.push_back(require_matrix(f, "C_d[" + std::to_string(k) + "]"));
    auto it = f.matrices.find("C_r[" + std::to_string(k) + "]");
    s.ris_cov.push_back(it != f.matrices.end() ? it->second : Mat(0, 0));
  }
  auto optional = [&](const std::string& name, Eigen::Index r, Eigen::Index c) {
    auto it = f.matrices.find(name);
    return it != f.matrices.end() ? it->second : Mat(Mat::Zero(r, c));
  };
  s.los = optional("T_bar", f.N, f.M);
  s.ris_corr = optional("R_RIS", f.N, f.N);
  s.tx_corr = require_matrix(f, "R_Tx");
  return s;
}

MatrixFile statistics_to_file(const model::ChannelStatistics& s) {
  MatrixFile f;
  f.M = s.dims.M;
  f.K = s.dims.K;
  f.N = s.dims.N;
  f.matrices["delta"] = Mat::Constant(1, 1, cd(s.delta, 0.0));
  for (int k = 0; k < s.dims.K; ++k) {
    f.matrices["C_d[" + std::to_string(k) + "]"] = s.direct_cov[k];
    f.matrices["C_r[" + std::to_string(k) + "]"] = s.ris_cov[k];
  }
  f.matrices["T_bar"] = s.los;
  f.matrices["R_RIS"] = s.ris_corr;
  f.matrices["R_Tx"] = s.tx_corr;
  return f;
}

model::ChannelStatistics read_statistics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  return statistics_from_file(parse_matrix_file(in));
}

void write_statistics(const std::string& path, const model::ChannelStatistics& stats) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  write_matrix_file(out, statistics_to_file(stats));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path);
}

}  // namespace rsris::io
