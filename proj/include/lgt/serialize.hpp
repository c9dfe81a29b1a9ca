#pragma once

#include "lgt/cell_complex.hpp"

#include "json.hpp"

namespace lgt {

// {"degree":k,"cells":[{"base":[...],"dirs":[...],"value":[...]}]} with the
// non-zero positive cells in canonical order; value lists residues.
nlohmann::json form_to_json(const DifferentialForm &f);
DifferentialForm form_from_json(const nlohmann::json &j, const BoxLattice &box, const GroupSpec &G);

} // namespace lgt
