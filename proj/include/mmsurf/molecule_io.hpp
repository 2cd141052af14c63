#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mmsurf/vec3.hpp"

namespace mmsurf {

struct Atom {
  Vec3 center;
  double radius = 0.0;  // Angstrom
  std::string element;  // may be empty
};

struct Molecule {
  std::vector<Atom> atoms;
  std::string name;

  bool empty() const { return atoms.empty(); }
  std::size_t size() const { return atoms.size(); }
};

/// Element symbol -> radius. Lookup ignores case.
class RadiusTable {
 public:
  RadiusTable() = default;
  RadiusTable(std::initializer_list<std::pair<const std::string, double>> entries);

  void set(const std::string& symbol, double radius);
  double lookup(const std::string& symbol) const;  // throws LookupError
  bool contains(const std::string& symbol) const;

  /// C 1.7 and H 1.2 as used for cyclohexane, plus common protein elements.
  static RadiusTable defaults();

 private:
  std::map<std::string, double> radii_;
};

/// "x y z r" per line; '#' comments and blank lines skipped.
Molecule parse_xyzr(std::istream& in);
/// ATOM/HETATM records, whitespace-tokenized; the last two fields are charge and radius.
Molecule parse_pqr(std::istream& in);

Molecule read_molecule(const std::string& path, const std::string& format);

void write_xyzr(std::ostream& out, const Molecule& mol);

std::vector<double> assign_radii(const std::vector<std::string>& symbols, const RadiusTable& table);

/// [min(c - r) - margin, max(c + r) + margin] per axis.
Box bounding_box(const Molecule& mol, double margin);

/// Radius that occurs most often in the molecule (ties go to the smaller radius).
double most_common_radius(const Molecule& mol);
double max_radius(const Molecule& mol);

}  // namespace mmsurf
