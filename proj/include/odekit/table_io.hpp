#ifndef ODEKIT_TABLE_IO_HPP
#define ODEKIT_TABLE_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "odekit/butcher.hpp"
#include "odekit/mri_coupling.hpp"

namespace odekit {

/// Result of loading a coefficient file: exactly one of the records is set.
struct LoadedTable {
  std::optional<ButcherTable> butcher;
  std::optional<MriCoupling> coupling;
  std::vector<std::string> warnings;
};

// Plain-text coefficient files: one record per line, values written with 17
// significant digits so load(save(t)) reproduces coefficients exactly.
// Butcher records: "butcher <name>", "kind explicit|dirk", "stages s",
// "order q", "embedding_order p", "c ...", one "A ..." line per row,
// "b ...", "btilde ...". MRI records: "mri <name>", "stages s", "degree K",
// "c ...", "omega k v1..vs" and "gamma k v1..vs" lines (row-major, rows of
// each k in order).

LoadedTable parse_table(std::istream& in);
LoadedTable load_table_file(const std::string& path);

void write_table(const ButcherTable& t, std::ostream& out);
void write_table(const MriCoupling& cp, std::ostream& out);
void save_table_file(const ButcherTable& t, const std::string& path);
void save_table_file(const MriCoupling& cp, const std::string& path);

/// Looks up a builtin table by name, or loads from file when the argument
/// is "file:<path>".
const ButcherTable& resolve_table(const std::string& spec);
const MriCoupling& resolve_coupling(const std::string& spec);

}  // namespace odekit

#endif
