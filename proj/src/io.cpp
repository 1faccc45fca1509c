#include "snodelab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace snodelab::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::BadInput, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

Index index_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    bad(std::string("\"") + key + "\" must be a positive integer");
  }
  return static_cast<Index>(v.get<long long>());
}

std::vector<CMatrix> blocks_from_json(const Json& j, const char* key) {
  const Json& arr = field(j, key);
  if (!arr.is_array()) bad(std::string("\"") + key + "\" must be an array of blocks");
  std::vector<CMatrix> out;
  for (const Json& b : arr) out.push_back(matrix_from_json(b));
  return out;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  bad("complex entries are numbers or [re, im]");
}

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  if (j.is_number()) return CMatrix::Constant(1, 1, Complex(j.get<double>(), 0.0));
  if (!j.is_array() || j.empty()) bad("matrix must be a non-empty array of rows");
  // A bare [re, im] pair is a 1 x 1 block.
  if (j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return CMatrix::Constant(1, 1, complex_from_json(j));
  }
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array()) bad("matrix rows must be arrays");
  const auto cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) bad("ragged matrix");
    for (Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

Json to_json(const ToeplitzSpec& spec) {
  Json s = Json::array();
  for (const CMatrix& b : spec.s) s.push_back(matrix_to_json(b));
  return {{"p", spec.p}, {"n", spec.n}, {"s", s}, {"nu", matrix_to_json(spec.nu)}};
}

Json to_json(const HankelSpec& spec) {
  Json h = Json::array();
  for (const CMatrix& b : spec.H) h.push_back(matrix_to_json(b));
  return {{"p", spec.p}, {"n", spec.n}, {"H", h}};
}

Json to_json(const SNode& node) {
  return {{"p", node.p},
          {"A", matrix_to_json(node.A)},
          {"S", matrix_to_json(node.S)},
          {"Phi1", matrix_to_json(node.Phi1)},
          {"Phi2", matrix_to_json(node.Phi2)}};
}

ToeplitzSpec toeplitz_from_json(const Json& j) {
  ToeplitzSpec spec;
  spec.p = index_field(j, "p");
  spec.n = index_field(j, "n");
  spec.s = blocks_from_json(j, "s");
  spec.nu = j.contains("nu") ? matrix_from_json(j.at("nu")) : zeros(spec.p, spec.p);
  spec.validate();
  return spec;
}

HankelSpec hankel_from_json(const Json& j) {
  HankelSpec spec;
  spec.p = index_field(j, "p");
  spec.n = index_field(j, "n");
  spec.H = blocks_from_json(j, "H");
  spec.validate();
  return spec;
}

SNode snode_from_json(const Json& j) {
  SNode node;
  node.p = index_field(j, "p");
  node.A = matrix_from_json(field(j, "A"));
  node.S = matrix_from_json(field(j, "S"));
  node.Phi1 = matrix_from_json(field(j, "Phi1"));
  node.Phi2 = matrix_from_json(field(j, "Phi2"));
  node.validate();
  return node;
}

AnySpec spec_from_json(const Json& j) {
  if (!j.is_object()) bad("spec must be a JSON object");
  if (j.contains("s")) return toeplitz_from_json(j);
  if (j.contains("H")) return hankel_from_json(j);
  if (j.contains("A")) return snode_from_json(j);
  bad("cannot tell the spec kind: expected key \"s\", \"H\" or \"A\"");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

DensityFn density_from_json(const Json& j) {
  const Json& name = field(j, "name");
  if (!name.is_string()) bad("density name must be a string");
  const std::string n = name.get<std::string>();
  const auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) bad(std::string("\"") + key + "\" must be a number");
    return j.at(key).get<double>();
  };
  if (n == "uniform") return density::uniform(number("a", -1.0), number("b", 1.0));
  if (n == "cauchy") return density::cauchy(number("tau", 1.0));
  if (n == "exp_sqrt") return density::exp_sqrt();
  if (n == "table") {
    const Json& t = field(j, "t");
    const Json& v = field(j, "values");
    if (!t.is_array() || !v.is_array()) bad("table needs arrays \"t\" and \"values\"");
    std::vector<double> ts;
    std::vector<double> vs;
    for (const Json& x : t) ts.push_back(x.get<double>());
    for (const Json& x : v) vs.push_back(x.get<double>());
    return density::table(ts, vs);
  }
  bad("unknown density \"" + n + "\"");
}

Scenario scenario_from_json(const Json& j) {
  Scenario sc;
  if (!j.is_object()) bad("scenario must be a JSON object");
  if (j.contains("family")) {
    if (!j.at("family").is_string()) bad("\"family\" must be a string");
    sc.family = j.at("family").get<std::string>();
  }
  if (sc.family != "hankel" && sc.family != "toeplitz") bad("family must be \"hankel\" or \"toeplitz\"");
  if (j.contains("density")) sc.density = j.at("density");
  if (j.contains("spec")) sc.spec = j.at("spec");
  if (sc.density.is_null() && sc.spec.is_null()) bad("scenario needs \"density\" or \"spec\"");
  if (sc.family == "toeplitz" && sc.spec.is_null()) bad("toeplitz scenarios need \"spec\"");
  if (j.contains("lambda")) sc.lambda = complex_from_json(j.at("lambda"));
  if (!(sc.lambda.imag() > 0.0)) bad("lambda must lie in the upper half-plane");
  if (j.contains("max_order")) sc.max_order = index_field(j, "max_order");
  if (sc.max_order > 12) bad("max_order above 12 is outside the supported range");
  return sc;
}

Json ball_to_json(const MatrixBall& ball) {
  return {{"z", complex_to_json(ball.z)},
          {"center", matrix_to_json(ball.center)},
          {"left_radius", matrix_to_json(ball.left_radius)},
          {"right_radius", matrix_to_json(ball.right_radius)},
          {"rho", matrix_to_json(ball.rho_forward)},
          {"rho_bar", matrix_to_json(ball.rho_reflected)}};
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv_header(Index p) {
  std::ostringstream out;
  out << "k";
  for (const char* part : {"re", "im"}) {
    for (Index i = 1; i <= p; ++i) {
      for (Index k = 1; k <= p; ++k) out << ",rhoinv_" << part << "_" << i << "_" << k;
    }
  }
  out << ",det_rhoinv,target,gap,cond\n";
  return out.str();
}

std::string trajectory_csv(const TrajectoryReport& report) {
  std::ostringstream out;
  out << trajectory_csv_header(report.p);
  for (const TrajectoryRow& row : report.rows) {
    out << row.k;
    for (int part = 0; part < 2; ++part) {
      for (Index i = 0; i < report.p; ++i) {
        for (Index k = 0; k < report.p; ++k) {
          const Complex v = row.rho_inv(i, k);
          out << "," << format_number(part == 0 ? v.real() : v.imag());
        }
      }
    }
    out << "," << format_number(row.det_rho_inv);
    out << "," << (row.target ? format_number(*row.target) : "");
    out << "," << (row.gap ? format_number(*row.gap) : "");
    out << "," << format_number(row.cond) << "\n";
  }
  return out.str();
}

void export_csv(const TrajectoryReport& report, const std::filesystem::path& path) {
  write_text_file(path, trajectory_csv(report));
}

}  // namespace snodelab::io
