#pragma once

#include <iosfwd>
#include <string>

#include "perhf/state.hpp"
#include "perhf/types.hpp"

namespace perhf {

/// A saved density matrix together with the model it was computed for.
///
/// Text format, version 1 (all reals printed with 17 significant digits, so
/// a write/read cycle is exact):
///
///     perhf-state 1
///     ngrid <n>
///     ecut <Hartree>
///     model <Z> <hf|reduced> <point|smeared> <sigma> <potentials 0|1> <h> <v0>
///     nk <number of fibers>
///     fiber <index> <xi_x> <xi_y> <xi_z> <weight> <basis size B>
///     <m1> <m2> <m3>                      (B lines, K = 2*pi*m)
///     <re> <im> <re> <im> ...             (B lines, one matrix row each)
///     ... repeated for every fiber ...
///     end
struct Snapshot {
  PeriodicState state;
  Model model;
  double ecut = 0.0;
};

void write_snapshot(std::ostream &out, const Snapshot &snap);
Snapshot read_snapshot(std::istream &in);

void save_snapshot(const std::string &path, const Snapshot &snap);
Snapshot load_snapshot(const std::string &path);

} // namespace perhf
