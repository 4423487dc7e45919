#pragma once

#include "cfs/dirac.hpp"
#include "cfs/jets.hpp"
#include "cfs/lattice.hpp"
#include "cfs/surface_layer.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cfs {

using Json = nlohmann::ordered_json;

/// Stable JSON: insertion-ordered keys, doubles as %.17g, non-finite values as null.
std::string emit_json(const Json& j);
/// Header line then one row per entry, doubles as %.17g.
std::string emit_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
/// CSV "t,sigma,drift" of a lattice conservation run.
std::string sigma_csv(const LatticeConservation& c);

Json vec_json(const Vec& v);
Json to_json(const ElReport& r);
Json to_json(const LatticeElReport& r);
Json to_json(const LatticeConservation& r);
Json to_json(const ConservationReport& r);
Json to_json(const BookkeepingIdentity& r);
Json to_json(const BalanceReport& r);
Json to_json(const SemiDerivReport& r);
Json to_json(const SecondOrderReport& r);
Json to_json(const ClosedChainDecomposition& r);
Json to_json(const CausalMapReport& r);
Json to_json(const ProductSpectrum& s);

/// Writes `content` to `path`; throws IoError.
void write_file(const std::string& path, const std::string& content);

}  // namespace cfs
