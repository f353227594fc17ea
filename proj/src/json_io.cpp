#include "qchain/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qchain/error.hpp"

namespace qchain {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedInput, what); }

const Json& field(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string(where) + ": missing field '" + key + "'");
  return j.at(key);
}

std::size_t count_field(const Json& j, const char* key, const char* where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    malformed(std::string(where) + ": '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double number(const Json& v, const char* where) {
  if (!v.is_number()) malformed(std::string(where) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) malformed(std::string(where) + ": non-finite entry");
  return x;
}

void check_grid(const Json& g, std::size_t rows, std::size_t cols, const char* name) {
  if (!g.is_array() || g.size() != rows) {
    malformed(std::string("matrix: '") + name + "' must have " + std::to_string(rows) + " rows");
  }
  for (const auto& row : g) {
    if (!row.is_array() || row.size() != cols) {
      malformed(std::string("matrix: every row of '") + name + "' must have " + std::to_string(cols) + " entries");
    }
  }
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const Json& j) {
  const std::size_t rows = count_field(j, "rows", "matrix");
  const std::size_t cols = count_field(j, "cols", "matrix");
  if (rows == 0 || cols == 0) malformed("matrix: empty shape");
  const Json& re = field(j, "re", "matrix");
  check_grid(re, rows, cols, "re");
  Matrix m(rows, cols);
  const bool has_im = j.contains("im");
  if (has_im) check_grid(j.at("im"), rows, cols, "im");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double a = number(re[r][c], "matrix.re");
      const double b = has_im ? number(j.at("im")[r][c], "matrix.im") : 0.0;
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(a, b);
    }
  }
  return m;
}

Json state_to_json(const DensityOperator& rho) {
  return Json{{"dim", rho.dim()}, {"matrix", matrix_to_json(rho.matrix())}};
}

DensityOperator state_from_json(const Json& j) {
  const Matrix m = matrix_from_json(field(j, "matrix", "state"));
  if (m.rows() != m.cols()) malformed("state: matrix must be square");
  if (j.contains("dim") && count_field(j, "dim", "state") != static_cast<std::size_t>(m.rows())) {
    throw Error(ErrorCode::DimensionMismatch, "state: 'dim' disagrees with the matrix shape");
  }
  return DensityOperator(m);
}

Json channel_to_json(const PositiveMapRep& map) {
  Json kraus = Json::array();
  for (const Matrix& k : map.kraus()) kraus.push_back(matrix_to_json(k));
  return Json{{"kraus", std::move(kraus)}, {"pre_transpose", map.pre_transpose()}};
}

PositiveMapRep channel_from_json(const Json& j) {
  const Json& ks = field(j, "kraus", "channel");
  if (!ks.is_array() || ks.empty()) malformed("channel: 'kraus' must be a nonempty array");
  std::vector<Matrix> kraus;
  for (const auto& k : ks) kraus.push_back(matrix_from_json(k));
  bool pre_transpose = false;
  if (j.contains("pre_transpose")) {
    if (!j.at("pre_transpose").is_boolean()) malformed("channel: 'pre_transpose' must be a boolean");
    pre_transpose = j.at("pre_transpose").get<bool>();
  }
  return PositiveMapRep(std::move(kraus), pre_transpose);
}

Json distribution_to_json(const Distribution& d) {
  Json out = Json::array();
  for (double p : d.probs()) out.push_back(p);
  return out;
}

Distribution distribution_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) malformed("distribution: expected a nonempty array of numbers");
  std::vector<double> probs;
  for (const auto& v : j) probs.push_back(number(v, "distribution"));
  try {
    return Distribution(std::move(probs));
  } catch (const Error& e) {
    malformed(std::string("distribution: ") + e.what());
  }
}

std::string format_scalar(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json scalar_json(double v) {
  if (!std::isfinite(v)) return format_scalar(v);
  const double rounded = std::stod(format_scalar(v));
  return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0"
}

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    malformed(what + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

}  // namespace qchain
