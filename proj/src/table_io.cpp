#include "odekit/table_io.hpp"

#include <cstdio>
#include <fstream>
#include <list>
#include <sstream>
#include <stdexcept>

namespace odekit {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_values(std::istringstream& is, const std::string& what) {
  std::vector<double> vals;
  double v;
  while (is >> v) vals.push_back(v);
  if (vals.empty()) throw std::runtime_error("coefficient file: empty " + what + " record");
  return vals;
}

}  // namespace

LoadedTable parse_table(std::istream& in) {
  LoadedTable result;
  std::string line;
  std::string first_kw, name;

  // header
  while (std::getline(in, line)) {
    std::istringstream is(line);
    if (!(is >> first_kw)) continue;
    if (first_kw[0] == '#') continue;
    is >> name;
    break;
  }
  if (first_kw.empty()) throw std::runtime_error("coefficient file: empty file");
  if (first_kw != "butcher" && first_kw != "mri")
    throw std::runtime_error("coefficient file: expected 'butcher' or 'mri' header, got '" + first_kw + "'");

  if (first_kw == "butcher") {
    ButcherTable t;
    t.name = name.empty() ? "file_table" : name;
    bool have_kind = false;
    int p = -1;
    while (std::getline(in, line)) {
      std::istringstream is(line);
      std::string kw;
      if (!(is >> kw) || kw[0] == '#') continue;
      if (kw == "kind") {
        std::string k;
        is >> k;
        if (k == "explicit")
          t.kind = TableKind::Explicit;
        else if (k == "dirk")
          t.kind = TableKind::Dirk;
        else
          throw std::runtime_error("coefficient file: unknown kind '" + k + "'");
        have_kind = true;
      } else if (kw == "stages") {
        is >> t.s;
      } else if (kw == "order") {
        is >> t.q;
      } else if (kw == "embedding_order") {
        is >> p;
      } else if (kw == "c") {
        t.c = parse_values(is, "c");
      } else if (kw == "A") {
        t.A.push_back(parse_values(is, "A"));
      } else if (kw == "b") {
        t.b = parse_values(is, "b");
      } else if (kw == "btilde") {
        t.btilde = parse_values(is, "btilde");
      } else {
        throw std::runtime_error("coefficient file: unknown record '" + kw + "'");
      }
    }
    if (!have_kind) throw std::runtime_error("coefficient file: missing kind record");
    if (t.s == 0) t.s = static_cast<int>(t.b.size());
    t.p = t.has_embedding() ? (p >= 0 ? p : t.q - 1) : 0;
    result.warnings = t.validate();
    result.butcher = std::move(t);
    return result;
  }

  MriCoupling cp;
  cp.name = name.empty() ? "file_coupling" : name;
  int stages = 0, degree = -1, order = 2;
  std::vector<std::pair<int, Vector>> omega_rows, gamma_rows;
  Vector c;
  while (std::getline(in, line)) {
    std::istringstream is(line);
    std::string kw;
    if (!(is >> kw) || kw[0] == '#') continue;
    if (kw == "stages") {
      is >> stages;
    } else if (kw == "degree") {
      is >> degree;
    } else if (kw == "order") {
      is >> order;
    } else if (kw == "c") {
      c = parse_values(is, "c");
    } else if (kw == "omega" || kw == "gamma") {
      int k;
      if (!(is >> k)) throw std::runtime_error("coefficient file: " + kw + " record missing power index");
      auto vals = parse_values(is, kw);
      (kw == "omega" ? omega_rows : gamma_rows).emplace_back(k, std::move(vals));
    } else {
      throw std::runtime_error("coefficient file: unknown record '" + kw + "'");
    }
  }
  if (stages == 0 || degree < 0) throw std::runtime_error("coefficient file: missing stages or degree record");
  cp.s = stages;
  cp.q = order;
  cp.degree = degree;
  cp.c = std::move(c);
  MriCoupling::Mat zero(stages, Vector(stages, 0.0));
  cp.omega.assign(degree + 1, zero);
  cp.gamma.assign(degree + 1, zero);
  auto place = [&](std::vector<MriCoupling::Mat>& into, const std::vector<std::pair<int, Vector>>& rows,
                   const char* what) {
    std::vector<int> next(degree + 1, 0);
    for (const auto& [k, vals] : rows) {
      if (k < 0 || k > degree) throw std::runtime_error(std::string("coefficient file: ") + what + " power out of range");
      if (next[k] >= stages) throw std::runtime_error(std::string("coefficient file: too many ") + what + " rows");
      if (static_cast<int>(vals.size()) != stages)
        throw std::runtime_error(std::string("coefficient file: ") + what + " row length mismatch");
      into[k][next[k]++] = vals;
    }
  };
  place(cp.omega, omega_rows, "omega");
  place(cp.gamma, gamma_rows, "gamma");
  cp.validate();
  result.coupling = std::move(cp);
  return result;
}

LoadedTable load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coefficient file: " + path);
  return parse_table(in);
}

void write_table(const ButcherTable& t, std::ostream& out) {
  out << "butcher " << t.name << "\n";
  out << "kind " << (t.kind == TableKind::Explicit ? "explicit" : "dirk") << "\n";
  out << "stages " << t.s << "\n";
  out << "order " << t.q << "\n";
  if (t.has_embedding()) out << "embedding_order " << t.p << "\n";
  auto row = [&](const char* kw, const Vector& v) {
    out << kw;
    for (double x : v) out << " " << fmt17(x);
    out << "\n";
  };
  row("c", t.c);
  for (const auto& a : t.A) row("A", a);
  row("b", t.b);
  if (t.has_embedding()) row("btilde", t.btilde);
}

void write_table(const MriCoupling& cp, std::ostream& out) {
  out << "mri " << cp.name << "\n";
  out << "stages " << cp.s << "\n";
  out << "order " << cp.q << "\n";
  out << "degree " << cp.degree << "\n";
  out << "c";
  for (double x : cp.c) out << " " << fmt17(x);
  out << "\n";
  for (int k = 0; k <= cp.degree; ++k)
    for (int i = 0; i < cp.s; ++i) {
      out << "omega " << k;
      for (double x : cp.omega[k][i]) out << " " << fmt17(x);
      out << "\n";
    }
  for (int k = 0; k <= cp.degree; ++k)
    for (int i = 0; i < cp.s; ++i) {
      out << "gamma " << k;
      for (double x : cp.gamma[k][i]) out << " " << fmt17(x);
      out << "\n";
    }
}

void save_table_file(const ButcherTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write coefficient file: " + path);
  write_table(t, out);
}

void save_table_file(const MriCoupling& cp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write coefficient file: " + path);
  write_table(cp, out);
}

namespace {
// Loaded file tables are kept alive for the life of the process so the
// resolve_* helpers can hand out stable references like the builtin catalog.
std::list<ButcherTable>& file_tables() {
  static std::list<ButcherTable> tables;
  return tables;
}
std::list<MriCoupling>& file_couplings() {
  static std::list<MriCoupling> couplings;
  return couplings;
}
}  // namespace

const ButcherTable& resolve_table(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) {
    auto loaded = load_table_file(spec.substr(5));
    if (!loaded.butcher) throw std::runtime_error(spec + " does not contain a Butcher table");
    file_tables().push_back(std::move(*loaded.butcher));
    return file_tables().back();
  }
  return builtin_table(spec);
}

const MriCoupling& resolve_coupling(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) {
    auto loaded = load_table_file(spec.substr(5));
    if (!loaded.coupling) throw std::runtime_error(spec + " does not contain MRI coupling tables");
    file_couplings().push_back(std::move(*loaded.coupling));
    return file_couplings().back();
  }
  return builtin_coupling(spec);
}

}  // namespace odekit
