#pragma once

// JSON forms of the library types used by the CLI.
//   model:  {p, q, ar_roots: [[re, im], ...], ma_mu: [[re, im], ...], sigma}
//   sampled ARMA: {delta, phi, theta, sigma2_delta, provenance}
//   driver: "brownian" or {"kind": ..., parameters}

#include "json.hpp"

#include "carma/levy.hpp"
#include "carma/model.hpp"
#include "carma/riemann.hpp"
#include "carma/spectral.hpp"

namespace carma {

using Json = nlohmann::json;

Json to_json(const CarmaModel& model);
/// Throws ConfigError on a malformed object, ModelError on an invalid model.
CarmaModel model_from_json(const Json& j);

Json to_json(const SampledArma& arma);
SampledArma sampled_arma_from_json(const Json& j);
std::string to_string(Provenance p);

Json to_json(const RiemannArma& r);

Json to_json(const Driver& d);
Driver driver_from_json(const Json& j);

}  // namespace carma
