#include "smoothcd/io.hpp"

#include <fstream>

#include "smoothcd/errors.hpp"
#include "smoothcd/harness.hpp"

namespace smoothcd {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigurationError(what); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing key '" + key + "'");
  return j.at(key);
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + ": expected a number");
  return j.get<double>();
}

long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
    bad(where + ": expected an integer");
  return j.is_number_integer() ? j.get<long>() : static_cast<long>(j.get<double>());
}

Groups groups_from_json(const json& j) {
  if (!j.is_array()) bad("psi.params.groups: expected an array of index arrays");
  Groups g;
  for (const auto& grp : j) {
    std::vector<int> idx;
    for (const auto& v : grp) idx.push_back(static_cast<int>(integer(v, "psi.params.groups")));
    g.push_back(std::move(idx));
  }
  return g;
}

}  // namespace

Matrix matrix_from_json(const json& j) {
  if (j.is_array()) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    MatrixXd A(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) bad("matrix: ragged nested array");
      for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = num(j[r][c], "matrix entry");
    }
    return Matrix(std::move(A));
  }
  const std::string fmt = need(j, "format", "matrix").get<std::string>();
  const long rows = integer(need(j, "rows", "matrix"), "matrix.rows");
  const long cols = integer(need(j, "cols", "matrix"), "matrix.cols");
  if (rows < 0 || cols < 0) bad("matrix: negative dimensions");
  if (fmt == "dense") {
    const json& data = need(j, "data", "matrix");
    if (!data.is_array() || static_cast<long>(data.size()) != rows * cols) bad("matrix.data: expected rows*cols numbers");
    MatrixXd A(rows, cols);
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) A(r, c) = num(data[r * cols + c], "matrix.data");
    return Matrix(std::move(A));
  }
  if (fmt == "csc") {
    const json& colptr = need(j, "colptr", "matrix");
    const json& rowind = need(j, "rowind", "matrix");
    const json& values = need(j, "values", "matrix");
    if (static_cast<long>(colptr.size()) != cols + 1 || rowind.size() != values.size())
      bad("matrix: inconsistent csc arrays");
    std::vector<Eigen::Triplet<double>> t;
    for (long c = 0; c < cols; ++c) {
      const long lo = integer(colptr[c], "colptr"), hi = integer(colptr[c + 1], "colptr");
      if (lo < 0 || hi < lo || hi > static_cast<long>(values.size())) bad("matrix: invalid colptr");
      for (long k = lo; k < hi; ++k) {
        const long r = integer(rowind[k], "rowind");
        if (r < 0 || r >= rows) bad("matrix: row index out of range");
        t.emplace_back(r, c, num(values[k], "values"));
      }
    }
    SparseMatrix S(rows, cols);
    S.setFromTriplets(t.begin(), t.end());
    return Matrix(std::move(S));
  }
  bad("matrix: unknown format '" + fmt + "' (valid: dense, csc)");
}

json matrix_to_json(const Matrix& A) {
  if (const SparseMatrix* S = A.as_sparse()) {
    std::vector<long> colptr(S->outerIndexPtr(), S->outerIndexPtr() + S->cols() + 1);
    std::vector<long> rowind(S->innerIndexPtr(), S->innerIndexPtr() + S->nonZeros());
    std::vector<double> values(S->valuePtr(), S->valuePtr() + S->nonZeros());
    return json{{"format", "csc"}, {"rows", S->rows()}, {"cols", S->cols()},
                {"colptr", colptr}, {"rowind", rowind}, {"values", values}};
  }
  const MatrixXd D = A.dense();
  std::vector<double> data;
  data.reserve(D.size());
  for (Eigen::Index r = 0; r < D.rows(); ++r)
    for (Eigen::Index c = 0; c < D.cols(); ++c) data.push_back(D(r, c));
  return json{{"format", "dense"}, {"rows", D.rows()}, {"cols", D.cols()}, {"data", data}};
}

VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) bad("expected an array of numbers");
  VectorXd v(j.size());
  for (size_t k = 0; k < j.size(); ++k) v[k] = num(j[k], "vector entry");
  return v;
}

json vector_to_json(const VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

ProxOracle prox_from_json(const json& j, int n) {
  const std::string kind_name = need(j, "kind", "psi").get<std::string>();
  ProxKind kind;
  try {
    kind = prox_kind_from_string(kind_name);
  } catch (const ArgumentError& e) {
    bad(e.what());
  }
  const json params = j.contains("params") ? j.at("params") : json::object();
  auto get = [&](const char* key, double dflt) { return params.contains(key) ? num(params.at(key), key) : dflt; };
  auto centre = [&]() { return params.contains("center") ? vector_from_json(params.at("center")) : VectorXd(); };
  switch (kind) {
    case ProxKind::zero: return ProxOracle::zero();
    case ProxKind::l1: return ProxOracle::l1(get("lambda", 1.0));
    case ProxKind::l2norm: return ProxOracle::l2norm(get("lambda", 1.0));
    case ProxKind::group: return ProxOracle::group(get("lambda", 1.0), groups_from_json(need(params, "groups", "psi.params")));
    case ProxKind::ball2: return ProxOracle::ball2(get("radius", 1.0), centre());
    case ProxKind::ball1: return ProxOracle::ball1(get("radius", 1.0), centre());
    case ProxKind::simplex: return ProxOracle::simplex(get("s", 1.0));
    case ProxKind::hyperbox: {
      VectorXd a = params.contains("a") ? vector_from_json(params.at("a")) : VectorXd::Ones(n);
      VectorXd lo = params.contains("lower") ? vector_from_json(params.at("lower")) : VectorXd::Zero(n);
      VectorXd hi = params.contains("upper") ? vector_from_json(params.at("upper")) : VectorXd::Ones(n);
      return ProxOracle::hyperbox(std::move(a), get("beta", 1.0), std::move(lo), std::move(hi));
    }
    case ProxKind::affine:
      return ProxOracle::affine_set(matrix_from_json(need(params, "A", "psi.params")).dense(),
                                    vector_from_json(need(params, "b", "psi.params")));
    case ProxKind::tv1d: return ProxOracle::tv1d(get("lambda", 1.0));
    case ProxKind::power: return ProxOracle::power_norm(get("r", 1.0), get("lambda", 1.0));
  }
  bad("psi: unsupported kind");
}

json prox_to_json(const ProxOracle& psi) {
  json params = json::object();
  switch (psi.kind) {
    case ProxKind::zero: break;
    case ProxKind::l1:
    case ProxKind::l2norm:
    case ProxKind::tv1d: params["lambda"] = psi.lambda; break;
    case ProxKind::group: params["lambda"] = psi.lambda; params["groups"] = psi.groups; break;
    case ProxKind::ball1:
    case ProxKind::ball2:
      params["radius"] = psi.radius;
      if (psi.center.size()) params["center"] = vector_to_json(psi.center);
      break;
    case ProxKind::simplex: params["s"] = psi.radius; break;
    case ProxKind::hyperbox:
      params["a"] = vector_to_json(psi.a);
      params["beta"] = psi.beta;
      params["lower"] = vector_to_json(psi.lower);
      params["upper"] = vector_to_json(psi.upper);
      break;
    case ProxKind::affine:
      params["A"] = matrix_to_json(Matrix(psi.affine->A()));
      params["b"] = vector_to_json(psi.affine->b());
      break;
    case ProxKind::power: params["r"] = psi.power; params["lambda"] = psi.lambda; break;
  }
  return json{{"kind", to_string(psi.kind)}, {"params", params}};
}

int LoadedProblem::n() const {
  if (composite) return composite->n();
  if (quartic) return quartic->n();
  return 0;
}

LoadedProblem problem_from_json(const json& j) {
  if (!j.is_object()) bad("problem: expected a JSON object");
  LoadedProblem out;
  std::optional<BlockPartition> blocks;
  if (j.contains("blocks")) {
    std::vector<int> sizes;
    for (const auto& v : j.at("blocks")) sizes.push_back(static_cast<int>(integer(v, "blocks")));
    try {
      blocks = BlockPartition(sizes);
    } catch (const std::invalid_argument& e) {
      bad(std::string("blocks: ") + e.what());
    }
  }
  const std::string kind = j.value("kind", std::string("composite"));
  try {
    if (kind == "quartic") {
      const MatrixXd E = j.contains("E") ? matrix_from_json(j.at("E")).dense() : MatrixXd();
      const MatrixXd A = j.contains("A") ? matrix_from_json(j.at("A")).dense() : MatrixXd();
      const VectorXd b = j.contains("b") ? vector_from_json(j.at("b")) : VectorXd();
      MatrixXd Af;
      VectorXd bf;
      if (j.contains("f")) {
        const json& f = j.at("f");
        if (f.contains("A")) Af = matrix_from_json(f.at("A")).dense();
        if (f.contains("b")) bf = vector_from_json(f.at("b"));
      }
      const int n = static_cast<int>(std::max({E.cols(), A.cols(), Af.cols(), bf.size()}));
      if (n == 0) bad("quartic problem: cannot infer the dimension");
      out.quartic.emplace(E, A, b, Af, bf, blocks ? *blocks : BlockPartition::scalar(n));
    } else if (kind == "composite") {
      Matrix A = matrix_from_json(need(j, "A", "problem"));
      VectorXd b = vector_from_json(need(j, "b", "problem"));
      ProxOracle psi = j.contains("psi") ? prox_from_json(j.at("psi"), static_cast<int>(b.size())) : ProxOracle::zero();
      out.composite.emplace(std::move(A), std::move(b), std::move(psi), blocks);
    } else {
      bad("problem: unknown kind '" + kind + "' (valid: composite, quartic)");
    }
  } catch (const ConfigurationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    bad(std::string("problem: ") + e.what());
  }
  if (j.contains("x0")) {
    out.x0 = vector_from_json(j.at("x0"));
    if (out.x0->size() != out.n()) bad("problem: x0 has the wrong dimension");
  }
  return out;
}

json problem_to_json(const QuadraticComposite& p, const std::optional<VectorXd>& x0) {
  json j{{"A", matrix_to_json(p.A)}, {"b", vector_to_json(p.b)}, {"psi", prox_to_json(p.psi)}};
  if (!p.partition.is_scalar()) j["blocks"] = p.partition.sizes();
  if (x0) j["x0"] = vector_to_json(*x0);
  return j;
}

KernelPtr kernel_from_json(const json& j, const BlockPartition& partition) {
  const std::string kind = need(j, "kind", "kernel").get<std::string>();
  try {
    if (kind == "power") return std::make_shared<PowerKernel>(j.contains("p") ? num(j.at("p"), "kernel.p") : 4.0, partition);
    if (kind == "quad") return std::make_shared<QuadKernel>(matrix_from_json(need(j, "A", "kernel")).dense(), partition);
  } catch (const ConfigurationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    bad(std::string("kernel: ") + e.what());
  }
  bad("kernel: unknown kind '" + kind + "' (valid: power, quad)");
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("config: expected a JSON object");
  RunConfig c;
  if (j.contains("problem")) {
    std::filesystem::path p = j.at("problem").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    c.problem_path = p.string();
  }
  if (j.contains("smoothing")) c.smoothing = j.at("smoothing").get<std::string>();
  if (j.contains("gamma")) {
    const json& g = j.at("gamma");
    if (g.is_number()) {
      c.gamma = g.get<double>();
    } else if (g.is_object()) {
      const std::string rule = g.value("rule", std::string("eps_over_2D"));
      if (rule != "eps_over_2D") bad("config.gamma: unknown rule '" + rule + "' (valid: eps_over_2D)");
      c.gamma_eps = g.contains("eps") ? num(g.at("eps"), "config.gamma.eps") : 0.1;
    } else {
      bad("config.gamma: expected a number or {\"rule\":\"eps_over_2D\",\"eps\":...}");
    }
  }
  if (j.contains("solver")) c.solver = j.at("solver").get<std::string>();
  if (c.solver != "cd" && c.solver != "accd" && c.solver != "restart" && c.solver != "rrcd")
    bad("config.solver: unknown solver '" + c.solver + "' (valid: cd, accd, restart, rrcd)");
  SolverConfig& s = c.solver_cfg;
  if (j.contains("alpha")) s.alpha = num(j.at("alpha"), "config.alpha");
  if (j.contains("epochs")) s.max_epochs = static_cast<int>(integer(j.at("epochs"), "config.epochs"));
  if (j.contains("max_iterations")) s.max_iterations = integer(j.at("max_iterations"), "config.max_iterations");
  if (j.contains("tol")) s.grad_tol = num(j.at("tol"), "config.tol");
  if (j.contains("seed")) s.seed = static_cast<std::uint64_t>(integer(j.at("seed"), "config.seed"));
  if (j.contains("trace_every")) s.trace_every = static_cast<int>(integer(j.at("trace_every"), "config.trace_every"));
  if (j.contains("sigma")) s.sigma = num(j.at("sigma"), "config.sigma");
  if (j.contains("restart")) {
    const json& r = j.at("restart");
    const std::string mode = r.value("mode", std::string("doubling"));
    const long K = r.contains("K0") ? integer(r.at("K0"), "restart.K0") : r.contains("K") ? integer(r.at("K"), "restart.K") : 10;
    if (mode == "fixed")
      c.restart = RestartSchedule::fixed(K);
    else if (mode == "doubling")
      c.restart = RestartSchedule::doubling(K);
    else
      bad("config.restart.mode: unknown mode '" + mode + "' (valid: fixed, doubling)");
    if (r.contains("max_rounds")) c.max_rounds = static_cast<int>(integer(r.at("max_rounds"), "restart.max_rounds"));
  }
  if (j.contains("kernel")) c.kernel = j.at("kernel");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    bad(std::string("config: ") + e.what());
  }
  return c;
}

json run_config_to_json(const RunConfig& c) {
  json j{{"problem", c.problem_path}, {"smoothing", c.smoothing}, {"solver", c.solver},
         {"alpha", c.solver_cfg.alpha}, {"epochs", c.solver_cfg.max_epochs}, {"tol", c.solver_cfg.grad_tol},
         {"seed", c.solver_cfg.seed}, {"trace_every", c.solver_cfg.trace_every}, {"kernel", c.kernel}};
  if (c.gamma)
    j["gamma"] = *c.gamma;
  else
    j["gamma"] = json{{"rule", "eps_over_2D"}, {"eps", c.gamma_eps}};
  if (c.solver_cfg.max_iterations) j["max_iterations"] = *c.solver_cfg.max_iterations;
  j["restart"] = json{{"mode", c.restart.mode == RestartSchedule::Mode::fixed ? "fixed" : "doubling"},
                      {"K0", c.restart.K}, {"max_rounds", c.max_rounds}};
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace smoothcd
