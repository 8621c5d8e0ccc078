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

#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "core_model.hpp"

namespace rsris::io {

// Text container for named complex matrices:
//
//   rsris-matrices 1
//   dims <M> <K> <N>
//   matrix <name> <rows> <cols>
//   <re> <im> <re> <im> ...        one line per row, row-major
//
// Lines starting with '#' are comments. Statistics files hold the matrices
// delta (1x1), C_d[k], C_r[k] for k = 0..K-1, T_bar, R_RIS and R_Tx.

struct MatrixFile {
  int M = 0, K = 0, N = 0;
  std::map<std::string, Mat> matrices;
};

MatrixFile parse_matrix_file(std::istream& in);
void write_matrix_file(std::ostream& out, const MatrixFile& file);

/// Loads statistics without validating them; call ChannelStatistics::validate.
model::ChannelStatistics read_statistics(const std::string& path);
void write_statistics(const std::string& path, const model::ChannelStatistics& stats);

model::ChannelStatistics statistics_from_file(const MatrixFile& file);
MatrixFile statistics_to_file(const model::ChannelStatistics& stats);

}  // namespace rsris::io
