/*
   Copyright 2026 the ddsa authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "ddsa/linalg.hpp"

namespace ddsa {

/// RFC-4180-style CSV writer: fields containing commas, quotes or newlines
/// are quoted with doubled inner quotes; floats print with 17 significant
/// digits and '.' as the decimal separator.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  CsvWriter& field(const std::string& s);
  CsvWriter& field(double v);
  CsvWriter& field(std::int64_t v);
  void end_row();

  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  bool row_started_ = false;
};

std::string format_double(double v);

/// Writes a matrix with the given header row, one matrix row per line.
void write_matrix_csv(const std::string& path, const std::vector<std::string>& header,
                      const Matrix& m);

}  // namespace ddsa
