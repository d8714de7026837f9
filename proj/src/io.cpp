#include "opcalc/io.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "opcalc/expr.hpp"

namespace opcalc::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::ParseError, what); }

int read_dim(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.at("dim").is_number_integer()) bad("matrix needs an integer 'dim'");
  const int d = j.at("dim").get<int>();
  if (d < 1) bad("matrix 'dim' must be >= 1");
  return d;
}

const json& read_entries(const json& j, int d) {
  if (!j.contains("entries") || !j.at("entries").is_array()) bad("matrix needs an 'entries' array");
  const json& e = j.at("entries");
  if (e.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
    bad("matrix 'entries' has " + std::to_string(e.size()) + " items, expected " + std::to_string(d * d));
  }
  return e;
}

// Entry of a time-dependent matrix: real and imaginary parts as expressions.
struct EntryExpr {
  expr::Expr re;
  expr::Expr im;
};

EntryExpr entry_expr(const json& v) {
  const auto part = [](const json& p) {
    if (p.is_number()) return expr::Expr::constant(p.get<double>());
    if (p.is_string()) return expr::Expr::parse(p.get<std::string>(), "t");
    bad("matrix entry parts must be numbers or expression strings");
  };
  if (v.is_array()) {
    if (v.size() != 2) bad("matrix entry pairs must have exactly two items");
    return {part(v[0]), part(v[1])};
  }
  return {part(v), expr::Expr::constant(0.0)};
}

double horizon_of(const json& j) {
  if (!j.contains("horizon")) return 1.0;
  const json& h = j.at("horizon");
  if (!h.is_array() || h.size() != 2 || !h[0].is_number() || !h[1].is_number()) bad("'horizon' must be [0, T]");
  if (h[0].get<double>() != 0.0) bad("'horizon' must start at 0");
  return h[1].get<double>();
}

}  // namespace

json to_json(const Operator& m) {
  json entries = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    for (int k = 0; k < m.dim(); ++k) entries.push_back({m(i, k).real(), m(i, k).imag()});
  }
  return {{"dim", m.dim()}, {"entries", std::move(entries)}};
}

Operator operator_from_json(const json& j) {
  const int d = read_dim(j);
  const json& e = read_entries(j, d);
  Matrix m(d, d);
  for (int idx = 0; idx < d * d; ++idx) {
    const json& v = e[static_cast<std::size_t>(idx)];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      bad("matrix entry " + std::to_string(idx) + " must be a [re, im] pair of numbers");
    }
    m(idx / d, idx % d) = Complex(v[0].get<double>(), v[1].get<double>());
  }
  return Operator(std::move(m));
}

evolution::GeneratorFamily generator_from_json(const json& j) {
  using evolution::GeneratorFamily;
  if (!j.is_object()) bad("generator description must be a JSON object");
  if (!j.contains("structure") || !j.at("structure").is_string()) bad("generator needs a 'structure' string");
  const std::string structure = j.at("structure").get<std::string>();
  const double horizon = horizon_of(j);
  const int dim = j.contains("dim") ? j.at("dim").get<int>() : -1;

  const auto check_dim = [&](const Operator& m) {
    if (dim != -1 && m.dim() != dim) bad("'dim' disagrees with the matrix dimension");
  };

  if (structure == "constant") {
    if (!j.contains("matrix")) bad("constant generator needs 'matrix'");
    Operator a = operator_from_json(j.at("matrix"));
    check_dim(a);
    return GeneratorFamily::constant(std::move(a), horizon);
  }
  if (structure == "commuting") {
    if (!j.contains("base") || !j.contains("profile") || !j.at("profile").is_string()) {
      bad("commuting generator needs 'base' and a 'profile' string");
    }
    Operator b = operator_from_json(j.at("base"));
    check_dim(b);
    return GeneratorFamily::commuting(expr::Expr::parse(j.at("profile").get<std::string>(), "t"), std::move(b), horizon);
  }
  if (structure == "general") {
    if (!j.contains("matrix")) bad("general generator needs 'matrix'");
    const json& mj = j.at("matrix");
    const int d = read_dim(mj);
    if (dim != -1 && d != dim) bad("'dim' disagrees with the matrix dimension");
    const json& e = read_entries(mj, d);
    std::vector<EntryExpr> entries;
    entries.reserve(e.size());
    for (const auto& v : e) entries.push_back(entry_expr(v));

    auto eval = [d, entries](double t) {
      Matrix m(d, d);
      for (int idx = 0; idx < d * d; ++idx) {
        const auto& en = entries[static_cast<std::size_t>(idx)];
        m(idx / d, idx % d) = en.re(t) + Complex(0.0, 1.0) * en.im(t);
      }
      return Operator(std::move(m));
    };
    auto derivative = [d, entries](double t, int k) {
      Matrix m(d, d);
      for (int idx = 0; idx < d * d; ++idx) {
        const auto& en = entries[static_cast<std::size_t>(idx)];
        m(idx / d, idx % d) = en.re.derivative(k)(t) + Complex(0.0, 1.0) * en.im.derivative(k)(t);
      }
      return Operator(std::move(m));
    };
    return GeneratorFamily::general(d, eval, derivative, horizon);
  }
  bad("unknown structure '" + structure + "'");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigError, path.string() + ": " + e.what());
  }
}

}  // namespace opcalc::io
