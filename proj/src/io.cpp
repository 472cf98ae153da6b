// io.cpp

#include "qcpo/io.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qcpo::io {

namespace {

using nlohmann::json;

void append_complex_array(std::string& out, const Matrix& m) {
  out += "[";
  bool first = true;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!first) out += ", ";
      first = false;
      out += "[" + format_double(m(i, j).real()) + ", " + format_double(m(i, j).imag()) + "]";
    }
  }
  out += "]";
}

}  // namespace

std::string kind_name(MatrixFile::Kind kind) {
  switch (kind) {
    case MatrixFile::Kind::kMatrix: return "matrix";
    case MatrixFile::Kind::kState: return "state";
    case MatrixFile::Kind::kQcpo: return "qcpo";
    case MatrixFile::Kind::kChoi: return "choi";
  }
  throw InputError("kind_name: unknown kind");
}

MatrixFile::Kind kind_from_name(const std::string& name) {
  if (name == "matrix") return MatrixFile::Kind::kMatrix;
  if (name == "state") return MatrixFile::Kind::kState;
  if (name == "qcpo") return MatrixFile::Kind::kQcpo;
  if (name == "choi") return MatrixFile::Kind::kChoi;
  throw InputError("unknown matrix kind '" + name + "'");
}

std::string format_double(double value) {
  if (!std::isfinite(value)) {
    throw InputError("format_double: non-finite value");
  }
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

MatrixFile parse_matrix_json(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!parsed.is_object() || !parsed.contains("kind") || !parsed.contains("dims") ||
      !parsed.contains("data")) {
    throw InputError("malformed JSON: expected object with kind, dims, data");
  }

  MatrixFile file;
  try {
    file.kind = kind_from_name(parsed.at("kind").get<std::string>());
    for (const auto& d : parsed.at("dims")) {
      file.dims.push_back(d.get<Index>());
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (file.dims.size() != 2 || file.dims[0] <= 0 || file.dims[1] <= 0) {
    throw InputError("dimension mismatch: dims must be two positive integers");
  }

  Index rows = 0, cols = 0;
  if (file.kind == MatrixFile::Kind::kMatrix) {
    rows = file.dims[0];
    cols = file.dims[1];
  } else {
    rows = cols = file.dims[0] * file.dims[1];
  }
  const auto& data = parsed.at("data");
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols) {
    std::ostringstream os;
    os << "dimension mismatch: expected " << rows * cols << " entries, found "
       << data.size();
    throw InputError(os.str());
  }
  file.data.resize(rows, cols);
  Index flat = 0;
  for (const auto& entry : data) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number()) {
      throw InputError("malformed JSON: entries must be [re, im] pairs");
    }
    file.data(flat / cols, flat % cols) =
        Complex(entry[0].get<double>(), entry[1].get<double>());
    ++flat;
  }

  if (file.kind != MatrixFile::Kind::kMatrix && !linalg::is_hermitian(file.data, 1e-10)) {
    std::ostringstream os;
    os << "non-Hermitian input: max deviation " << linalg::hermiticity_defect(file.data)
       << " for kind '" << kind_name(file.kind) << "'";
    throw InputError(os.str());
  }
  return file;
}

MatrixFile read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix_json(buffer.str());
}

std::string to_json(const MatrixFile& file) {
  std::string out = "{\"kind\": \"" + kind_name(file.kind) + "\", \"dims\": [";
  out += std::to_string(file.dims.at(0)) + ", " + std::to_string(file.dims.at(1));
  out += "], \"data\": ";
  append_complex_array(out, file.data);
  out += "}\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file '" + path + "' for writing");
  out << contents;
  if (!out) throw InputError("write failed for '" + path + "'");
}

MatrixFile from_bipartite(MatrixFile::Kind kind, const linalg::BipartiteOperator& op) {
  MatrixFile file;
  file.kind = kind;
  file.dims = {op.dim_a, op.dim_b};
  file.data = op.mat;
  return file;
}

linalg::BipartiteOperator as_bipartite(const MatrixFile& file) {
  if (file.kind == MatrixFile::Kind::kMatrix) {
    throw InputError("matrix-kind file does not carry slot dimensions");
  }
  return linalg::BipartiteOperator(file.dims.at(0), file.dims.at(1), file.data);
}

std::string report_to_json(const classify::ClassificationReport& report) {
  std::string out = "{";
  out += "\"kind\": \"" + report.kind + "\"";
  out += ", \"dims\": [" + std::to_string(report.dim_a) + ", " +
         std::to_string(report.dim_b) + "]";
  auto add_bool = [&out](const char* key, const std::optional<bool>& value) {
    if (value) out += std::string(", \"") + key + "\": " + (*value ? "true" : "false");
  };
  auto add_double = [&out](const char* key, const std::optional<double>& value) {
    if (value) out += std::string(", \"") + key + "\": " + format_double(*value);
  };
  add_double("min_eig", report.min_eig);
  add_double("pt_min_eig", report.pt_min_eig);
  add_bool("is_psd", report.is_psd);
  add_bool("is_qcpo", report.is_qcpo);
  add_double("marginal_deviation", report.marginal_deviation);
  add_bool("is_cp", report.cp);
  add_bool("is_ccp", report.ccp);
  add_bool("is_unital", report.unital);
  add_bool("is_trace_preserving", report.trace_preserving);
  add_bool("is_ppt_state", report.is_ppt_state);
  add_bool("is_npt_state", report.is_npt_state);
  if (report.witness) {
    out += ", \"witness\": [";
    for (Index i = 0; i < report.witness->size(); ++i) {
      if (i) out += ", ";
      out += "[" + format_double((*report.witness)(i).real()) + ", " +
             format_double((*report.witness)(i).imag()) + "]";
    }
    out += "]";
  }
  if (report.kpos) {
    out += ", \"kpos\": {\"k_positive_up_to\": " +
           std::to_string(report.kpos->k_positive_up_to);
    out += ", \"method\": \"" + report.kpos->method + "\"";
    out += ", \"min_values\": [";
    for (std::size_t i = 0; i < report.kpos->min_values.size(); ++i) {
      if (i) out += ", ";
      out += format_double(report.kpos->min_values[i]);
    }
    out += "]}";
  }
  out += "}\n";
  return out;
}

}  // namespace qcpo::io
