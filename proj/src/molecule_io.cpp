#include "mmsurf/molecule_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mmsurf/error.hpp"

namespace mmsurf {

namespace {

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double to_number(const std::string& tok, int line, const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError(std::string("malformed ") + what + " '" + tok + "'", line);
  return v;
}

void check_radius(double r, int line) {
  if (!(r > 0.0)) throw ValidationError("radius must be positive, got " + std::to_string(r), line);
}

}  // namespace

RadiusTable::RadiusTable(std::initializer_list<std::pair<const std::string, double>> entries) {
  for (const auto& [k, v] : entries) set(k, v);
}

void RadiusTable::set(const std::string& symbol, double radius) {
  if (!(radius > 0.0)) throw DomainError("radius for '" + symbol + "' must be positive");
  radii_[upper(symbol)] = radius;
}

double RadiusTable::lookup(const std::string& symbol) const {
  auto it = radii_.find(upper(symbol));
  if (it == radii_.end()) throw LookupError(symbol);
  return it->second;
}

bool RadiusTable::contains(const std::string& symbol) const {
  return radii_.count(upper(symbol)) != 0;
}

RadiusTable RadiusTable::defaults() {
  return RadiusTable{{"C", 1.7}, {"H", 1.2}, {"N", 1.55}, {"O", 1.52}, {"S", 1.8}, {"P", 1.8}};
}

Molecule parse_xyzr(std::istream& in) {
  Molecule mol;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() < 4) throw ParseError("expected 'x y z r'", lineno);
    Atom a;
    a.center = {to_number(toks[0], lineno, "x"), to_number(toks[1], lineno, "y"),
                to_number(toks[2], lineno, "z")};
    a.radius = to_number(toks[3], lineno, "radius");
    check_radius(a.radius, lineno);
    if (toks.size() > 4) a.element = toks[4];
    mol.atoms.push_back(std::move(a));
  }
  return mol;
}

Molecule parse_pqr(std::istream& in) {
  Molecule mol;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string rec = upper(toks[0]);
    if (rec != "ATOM" && rec != "HETATM") continue;
    // ATOM serial name resName [chain] resSeq x y z charge radius
    if (toks.size() < 9) throw ParseError("truncated " + rec + " record", lineno);
    const std::size_t n = toks.size();
    Atom a;
    a.center = {to_number(toks[n - 5], lineno, "x"), to_number(toks[n - 4], lineno, "y"),
                to_number(toks[n - 3], lineno, "z")};
    to_number(toks[n - 2], lineno, "charge");
    a.radius = to_number(toks[n - 1], lineno, "radius");
    check_radius(a.radius, lineno);
    // First letter of the atom name is the element for the usual protein atoms.
    for (char c : toks[2]) {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        a.element = std::string(1, c);
        break;
      }
    }
    mol.atoms.push_back(std::move(a));
  }
  return mol;
}

Molecule read_molecule(const std::string& path, const std::string& format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open input file '" + path + "'");
  Molecule mol;
  if (format == "xyzr")
    mol = parse_xyzr(in);
  else if (format == "pqr")
    mol = parse_pqr(in);
  else
    throw ConfigError("unknown input format '" + format + "'");
  mol.name = std::filesystem::path(path).stem().string();
  return mol;
}

void write_xyzr(std::ostream& out, const Molecule& mol) {
  out << "# " << mol.name << '\n' << std::setprecision(17);
  for (const auto& a : mol.atoms)
    out << a.center.x << ' ' << a.center.y << ' ' << a.center.z << ' ' << a.radius << '\n';
}

std::vector<double> assign_radii(const std::vector<std::string>& symbols, const RadiusTable& table) {
  std::vector<double> radii;
  radii.reserve(symbols.size());
  for (const auto& s : symbols) radii.push_back(table.lookup(s));
  return radii;
}

Box bounding_box(const Molecule& mol, double margin) {
  if (mol.empty()) throw DomainError("bounding box of an empty molecule");
  if (!(margin >= 0.0)) throw DomainError("margin must be non-negative");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Box b{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const auto& a : mol.atoms) {
    for (int ax = 0; ax < 3; ++ax) {
      b.lo[ax] = std::min(b.lo[ax], a.center[ax] - a.radius);
      b.hi[ax] = std::max(b.hi[ax], a.center[ax] + a.radius);
    }
  }
  for (int ax = 0; ax < 3; ++ax) {
    b.lo[ax] -= margin;
    b.hi[ax] += margin;
  }
  return b;
}

double most_common_radius(const Molecule& mol) {
  if (mol.empty()) throw DomainError("no atoms");
  std::map<double, std::size_t> counts;
  for (const auto& a : mol.atoms) ++counts[a.radius];
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

double max_radius(const Molecule& mol) {
  double r = 0.0;
  for (const auto& a : mol.atoms) r = std::max(r, a.radius);
  return r;
}

}  // namespace mmsurf
