#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "prism/structure.hpp"

namespace prism {

// JSON-lines structure files. One object per line:
//
//   {"id": "mp-1", "lattice": [[ax,ay,az],[bx,by,bz],[cx,cy,cz]],
//    "frac_coords": [[f1,f2,f3], ...], "atomic_numbers": [11, 17], "target": -3.2}
//
// "lattice" lists the three lattice vectors l1, l2, l3 in Angstrom; they are
// the columns of L, so r = L f. "target" is optional (number or null).
// Blank lines and lines starting with '#' are skipped.

inline constexpr std::string_view kStructureFileHeader =
    "# prism-structures v1: \"lattice\" = [l1, l2, l3] lattice vectors in Angstrom "
    "(columns of L, r = L f); \"frac_coords\" in the lattice basis";

struct ParseOptions {
  /// Reject fractional coordinates outside [0, 1) instead of wrapping them.
  bool strict = false;
};

/// Throws ParseError, InvalidLattice or InvalidFraction carrying the line number.
std::vector<CrystalStructure> parse_structures(std::istream& in, ParseOptions options = {});
std::vector<CrystalStructure> parse_structures(const std::filesystem::path& path,
                                               ParseOptions options = {});

std::string structure_to_json_line(const CrystalStructure& s);
/// Header comment followed by one line per structure.
std::string serialize_structures(const std::vector<CrystalStructure>& structures);
void write_structures(const std::filesystem::path& path,
                      const std::vector<CrystalStructure>& structures);

}  // namespace prism
