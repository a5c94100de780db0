#include "fvpkit/serialization.hpp"

#include <cmath>

#include "fvpkit/csv.hpp"
#include "fvpkit/errors.hpp"

namespace fvpkit {

namespace {

Matrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(std::string(name) + ": expected a nonempty array");
  }
  if (!j[0].is_array()) {
    // diagonal weights
    Matrix m = Matrix::Zero(j.size(), j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
      m(i, i) = complex_from_json(j[i]);
    }
    return m;
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ValidationError(std::string(name) + ": ragged matrix rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(complex_to_json(m(r, c)));
    }
    rows.push_back(row);
  }
  return rows;
}

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r != c && m(r, c) != Complex(0, 0)) return false;
    }
  }
  return true;
}

json gram_to_json(const Matrix& m) {
  if (is_diagonal(m)) {
    json diag = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      diag.push_back(complex_to_json(m(i, i)));
    }
    return diag;
  }
  return matrix_to_json(m);
}

}  // namespace

json complex_to_json(const Complex& z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw ValidationError("expected a number or [re, im] pair");
}

json triple_to_json(const GelfandTriple& t) {
  return json{{"gram_V", gram_to_json(t.gram_V())},
              {"gram_H", gram_to_json(t.gram_H())},
              {"C1", t.c1()},
              {"C2", t.c2()}};
}

GelfandTriple triple_from_json(const json& j) {
  if (!j.contains("gram_V") || !j.contains("gram_H")) {
    throw ValidationError("triple: gram_V and gram_H are required");
  }
  std::optional<double> c1, c2;
  if (j.contains("C1")) c1 = j.at("C1").get<double>();
  if (j.contains("C2")) c2 = j.at("C2").get<double>();
  return GelfandTriple(matrix_from_json(j.at("gram_V"), "gram_V"),
                       matrix_from_json(j.at("gram_H"), "gram_H"), c1, c2);
}

json operator_to_json(const CoerciveOperator& op) {
  json doc;
  doc["backend"] = op.backend() == Backend::Spectral ? "spectral" : "matrix";
  if (op.backend() == Backend::Spectral) {
    json eigs = json::array();
    for (Eigen::Index i = 0; i < op.eigenvalues().size(); ++i) {
      eigs.push_back(op.eigenvalues()(i));
    }
    doc["eigenvalues"] = eigs;
  } else {
    doc["matrix"] = matrix_to_json(op.matrix_table());
  }
  doc["gram_V"] = gram_to_json(op.triple().gram_V());
  doc["gram_H"] = gram_to_json(op.triple().gram_H());
  doc["constants"] = json{{"C1", op.triple().c1()},
                          {"C2", op.triple().c2()},
                          {"C3", op.c3()},
                          {"C4", op.c4()},
                          {"k", op.k()}};
  return doc;
}

CoerciveOperator operator_from_json(const json& j) {
  if (!j.contains("backend")) throw ValidationError("operator: backend is required");
  const std::string backend = j.at("backend").get<std::string>();

  std::optional<double> c1, c2;
  std::optional<double> c3, c4, k;
  if (j.contains("constants")) {
    const json& c = j.at("constants");
    if (c.contains("C1")) c1 = c.at("C1").get<double>();
    if (c.contains("C2")) c2 = c.at("C2").get<double>();
    if (c.contains("C3")) c3 = c.at("C3").get<double>();
    if (c.contains("C4")) c4 = c.at("C4").get<double>();
    if (c.contains("k")) k = c.at("k").get<double>();
  }

  if (backend == "spectral") {
    if (!j.contains("eigenvalues")) {
      throw ValidationError("spectral operator: eigenvalues are required");
    }
    const json& eigs_json = j.at("eigenvalues");
    RealVector eigs(eigs_json.size());
    for (std::size_t i = 0; i < eigs_json.size(); ++i) {
      eigs(i) = eigs_json[i].get<double>();
    }
    GelfandTriple triple =
        j.contains("gram_V")
            ? GelfandTriple(matrix_from_json(j.at("gram_V"), "gram_V"),
                            j.contains("gram_H")
                                ? matrix_from_json(j.at("gram_H"), "gram_H")
                                : Matrix(Matrix::Identity(eigs.size(), eigs.size())),
                            c1, c2)
            : GelfandTriple::spectral(eigs);
    if (c3 && c4 && k) {
      return CoerciveOperator::spectral(eigs, std::move(triple), *c3, *c4, *k);
    }
    const EstimatedConstants est =
        estimate_constants(Matrix(eigs.cast<Complex>().asDiagonal()), triple);
    return CoerciveOperator::spectral(eigs, std::move(triple), est.c3, est.c4,
                                      est.k);
  }
  if (backend == "matrix") {
    if (!j.contains("matrix")) throw ValidationError("matrix operator: matrix is required");
    Matrix table = matrix_from_json(j.at("matrix"), "matrix");
    GelfandTriple triple =
        j.contains("gram_V")
            ? GelfandTriple(matrix_from_json(j.at("gram_V"), "gram_V"),
                            j.contains("gram_H")
                                ? matrix_from_json(j.at("gram_H"), "gram_H")
                                : Matrix(Matrix::Identity(table.rows(), table.rows())),
                            c1, c2)
            : GelfandTriple::euclidean(static_cast<int>(table.rows()));
    if (c3 && c4 && k) {
      return CoerciveOperator::matrix(std::move(table), std::move(triple), *c3,
                                      *c4, *k);
    }
    return CoerciveOperator::matrix(std::move(table), std::move(triple));
  }
  throw ValidationError("operator: backend must be \"spectral\" or \"matrix\"");
}

json neumann_to_json(const NeumannModel& m) {
  json geom;
  if (m.is_interval()) {
    geom = json{{"type", "interval"},
                {"L", std::get<Interval>(m.geometry()).length}};
  } else {
    const Rectangle& r = std::get<Rectangle>(m.geometry());
    geom = json{{"type", "rectangle"}, {"Lx", r.lx}, {"Ly", r.ly}};
  }
  return json{{"geometry", geom}, {"N", m.truncation()}};
}

NeumannModel neumann_from_json(const json& j) {
  if (!j.contains("geometry") || !j.contains("N")) {
    throw ValidationError("model: geometry and N are required");
  }
  const json& g = j.at("geometry");
  const std::string type = g.value("type", "");
  const int n = j.at("N").get<int>();
  if (type == "interval") {
    if (!g.contains("L")) throw ValidationError("interval geometry: L is required");
    return build_model(Interval{g.at("L").get<double>()}, n);
  }
  if (type == "rectangle") {
    if (!g.contains("Lx") || !g.contains("Ly")) {
      throw ValidationError("rectangle geometry: Lx and Ly are required");
    }
    return build_model(
        Rectangle{g.at("Lx").get<double>(), g.at("Ly").get<double>()}, n);
  }
  throw ValidationError("geometry type must be \"interval\" or \"rectangle\"");
}

json source_term_to_json(const SourceTerm& f) {
  json nodes = json::array();
  for (Eigen::Index i = 0; i < f.nodes().size(); ++i) nodes.push_back(f.nodes()(i));
  json samples = json::array();
  for (const Vector& s : f.samples()) {
    json row = json::array();
    for (Eigen::Index i = 0; i < s.size(); ++i) row.push_back(complex_to_json(s(i)));
    samples.push_back(row);
  }
  json doc{{"nodes", nodes},
           {"samples", samples},
           {"interpolation", f.interpolation() == Interpolation::PiecewiseLinear
                                 ? "piecewise-linear"
                                 : "piecewise-constant"}};
  if (f.holder()) {
    doc["holder"] = json{{"sigma", f.holder()->sigma},
                         {"constant", f.holder()->constant}};
  }
  return doc;
}

SourceTerm source_term_from_json(const json& j) {
  if (!j.contains("nodes") || !j.contains("samples")) {
    throw ValidationError("source term: nodes and samples are required");
  }
  const json& nj = j.at("nodes");
  RealVector nodes(nj.size());
  for (std::size_t i = 0; i < nj.size(); ++i) nodes(i) = nj[i].get<double>();
  const json& sj = j.at("samples");
  std::vector<Vector> samples;
  for (const json& row : sj) {
    Vector v(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) v(i) = complex_from_json(row[i]);
    samples.push_back(std::move(v));
  }
  Interpolation interp = Interpolation::PiecewiseLinear;
  if (j.value("interpolation", "piecewise-linear") == "piecewise-constant") {
    interp = Interpolation::PiecewiseConstant;
  }
  std::optional<HolderDeclaration> holder;
  if (j.contains("holder")) {
    holder = HolderDeclaration{j.at("holder").at("sigma").get<double>(),
                               j.at("holder").at("constant").get<double>()};
  }
  return SourceTerm(std::move(nodes), std::move(samples), interp, holder);
}

json fvp_data_to_json(const FvpData& d) {
  json ut = json::array();
  for (Eigen::Index i = 0; i < d.u_T.size(); ++i) {
    ut.push_back(complex_to_json(d.u_T(i)));
  }
  return json{{"f", source_term_to_json(d.f)}, {"u_T", ut}, {"T", d.T}};
}

FvpData fvp_data_from_json(const json& j) {
  if (!j.contains("f") || !j.contains("u_T") || !j.contains("T")) {
    throw ValidationError("final value data: f, u_T and T are required");
  }
  SourceTerm f = source_term_from_json(j.at("f"));
  const json& uj = j.at("u_T");
  Vector u_T(uj.size());
  for (std::size_t i = 0; i < uj.size(); ++i) u_T(i) = complex_from_json(uj[i]);
  FvpData data{std::move(f), std::move(u_T), j.at("T").get<double>()};
  validate(data);
  return data;
}

json compatibility_report_to_json(const CompatibilityReport& r) {
  json doc;
  doc["verdict"] = verdict_name(r.verdict);
  doc["levels"] = r.levels;
  json norms = json::array();
  for (double g : r.graph_norms) {
    if (std::isfinite(g)) {
      norms.push_back(g);
    } else {
      norms.push_back("overflow");
    }
  }
  doc["graph_norms"] = norms;
  doc["log_graph_norms"] = r.log_graph_norms;
  doc["log_kappa"] = r.log_kappa;
  if (std::isfinite(r.kappa)) doc["kappa"] = r.kappa;
  if (r.y_norm) doc["y_norm"] = *r.y_norm;
  if (r.overflow_mode) doc["overflow_mode"] = *r.overflow_mode;
  doc["yf_converged"] = r.yf_converged;
  return doc;
}

void trajectory_to_csv(const Trajectory& traj,
                       const std::filesystem::path& path) {
  CsvWriter csv(path);
  std::vector<std::string> header{"t"};
  const int n = static_cast<int>(traj.values().front().size());
  for (int j = 0; j < n; ++j) header.push_back("coefficient_" + std::to_string(j));
  csv.write_row(header);
  for (Eigen::Index i = 0; i < traj.grid().size(); ++i) {
    std::vector<std::string> row{fmt_g17(traj.grid()(i))};
    for (int j = 0; j < n; ++j) row.push_back(fmt_complex(traj.values()[i](j)));
    csv.write_row(row);
  }
}

void source_term_to_csv(const SourceTerm& f, const std::filesystem::path& path) {
  CsvWriter csv(path);
  std::vector<std::string> header{"t"};
  for (int j = 0; j < f.dim(); ++j) header.push_back("coefficient_" + std::to_string(j));
  csv.write_row(header);
  for (Eigen::Index i = 0; i < f.nodes().size(); ++i) {
    std::vector<std::string> row{fmt_g17(f.nodes()(i))};
    for (int j = 0; j < f.dim(); ++j) row.push_back(fmt_complex(f.samples()[i](j)));
    csv.write_row(row);
  }
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::InDomain:
      return "in_domain";
    case Verdict::Diverging:
      return "diverging";
    default:
      return "inconclusive";
  }
}

}  // namespace fvpkit
