// io.hpp — file formats for the command line front end: JSON matrix files,
// classification reports, and deterministic number formatting.

#pragma once

#include "qcpo/classify.hpp"
#include "qcpo/linalg.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qcpo::io {

// Input problems (missing file, malformed JSON, shape or hermiticity
// violations) map to exit code 1; semantic validation failures to exit 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MatrixFile {
  enum class Kind { kMatrix, kState, kQcpo, kChoi };

  Kind kind = Kind::kMatrix;
  std::vector<Index> dims;  // [rows, cols] for kMatrix, [nA, nB] otherwise
  Matrix data;
};

std::string kind_name(MatrixFile::Kind kind);
MatrixFile::Kind kind_from_name(const std::string& name);

// 17 significant digits: lossless double roundtrip and byte-stable output.
std::string format_double(double value);

MatrixFile parse_matrix_json(const std::string& text);
MatrixFile read_matrix_file(const std::string& path);
std::string to_json(const MatrixFile& file);
void write_text_file(const std::string& path, const std::string& contents);

MatrixFile from_bipartite(MatrixFile::Kind kind, const linalg::BipartiteOperator& op);
linalg::BipartiteOperator as_bipartite(const MatrixFile& file);

std::string report_to_json(const classify::ClassificationReport& report);

}  // namespace qcpo::io
