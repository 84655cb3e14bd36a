#include "carma/json_io.hpp"

#include "carma/errors.hpp"

namespace carma {

namespace {

Json complex_list(std::span<const cdouble> v) {
    Json out = Json::array();
    for (const cdouble c : v) out.push_back({c.real(), c.imag()});
    return out;
}

std::vector<cdouble> parse_complex_list(const Json& j, const char* field) {
    if (!j.is_array()) throw ConfigError(std::string("model field '") + field + "' must be an array");
    std::vector<cdouble> out;
    for (const Json& e : j) {
        if (e.is_number()) {
            out.emplace_back(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            out.emplace_back(e[0].get<double>(), e[1].get<double>());
        } else {
            throw ConfigError(std::string("model field '") + field + "' needs numbers or [re, im] pairs");
        }
    }
    return out;
}

const Json& require(const Json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(std::string(what) + " is missing the field '" + key + "'");
    return j.at(key);
}

double number(const Json& j, const char* key, const char* what) {
    const Json& v = require(j, key, what);
    if (!v.is_number()) throw ConfigError(std::string(what) + " field '" + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

Json to_json(const CarmaModel& model) {
    return {{"p", model.p()},
            {"q", model.q()},
            {"ar_roots", complex_list(model.ar_roots())},
            {"ma_mu", complex_list(model.ma_mu())},
            {"sigma", model.sigma()}};
}

CarmaModel model_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("model must be a JSON object");
    std::vector<cdouble> ar = parse_complex_list(require(j, "ar_roots", "model"), "ar_roots");
    std::vector<cdouble> ma = j.contains("ma_mu") ? parse_complex_list(j.at("ma_mu"), "ma_mu") : std::vector<cdouble>{};
    const double sigma = j.contains("sigma") ? number(j, "sigma", "model") : 1.0;
    if (j.contains("p") && j.at("p") != static_cast<int>(ar.size()))
        throw ConfigError("model field 'p' does not match the number of ar_roots");
    if (j.contains("q") && j.at("q") != static_cast<int>(ma.size()))
        throw ConfigError("model field 'q' does not match the number of ma_mu");
    return CarmaModel(std::move(ar), std::move(ma), sigma);
}

std::string to_string(Provenance p) {
    return p == Provenance::ExactFactorization ? "exact_factorization" : "asymptotic";
}

Json to_json(const SampledArma& arma) {
    return {{"delta", arma.delta},
            {"phi", arma.phi},
            {"theta", arma.theta},
            {"sigma2_delta", arma.sigma2_delta},
            {"provenance", to_string(arma.provenance)}};
}

SampledArma sampled_arma_from_json(const Json& j) {
    SampledArma a;
    a.delta = number(j, "delta", "sampled ARMA");
    a.phi = require(j, "phi", "sampled ARMA").get<std::vector<double>>();
    a.theta = require(j, "theta", "sampled ARMA").get<std::vector<double>>();
    a.sigma2_delta = number(j, "sigma2_delta", "sampled ARMA");
    const std::string prov = j.value("provenance", "exact_factorization");
    if (prov == "exact_factorization") a.provenance = Provenance::ExactFactorization;
    else if (prov == "asymptotic") a.provenance = Provenance::Asymptotic;
    else throw ConfigError("unknown provenance '" + prov + "'");
    if (a.phi.empty() || a.theta.empty()) throw ConfigError("sampled ARMA needs non-empty phi and theta");
    return a;
}

Json to_json(const RiemannArma& r) {
    return {{"delta", r.delta},
            {"h", r.h},
            {"sigma", r.sigma},
            {"theta_tilde", r.theta_tilde},
            {"ma_polynomial", r.ma_polynomial()},
            {"derived_roots", complex_list(r.derived_roots)},
            {"invertible", r.invertible}};
}

Json to_json(const Driver& d) {
    Json out = {{"kind", d.name()}};
    switch (d.kind) {
        case Driver::Kind::BrownianMotion: break;
        case Driver::Kind::CompoundPoissonNormal: out["rate"] = d.rate; break;
        case Driver::Kind::GammaCentered:
            out["shape"] = d.shape;
            out["scale"] = d.scale;
            break;
        case Driver::Kind::VarianceGamma: out["nu"] = d.nu; break;
    }
    return out;
}

Driver driver_from_json(const Json& j) {
    const std::string kind = j.is_string() ? j.get<std::string>() : require(j, "kind", "driver").get<std::string>();
    auto param = [&j](const char* key, double fallback) {
        return j.is_object() && j.contains(key) ? j.at(key).get<double>() : fallback;
    };
    try {
        if (kind == "brownian") return Driver::brownian();
        if (kind == "compound_poisson") return Driver::compound_poisson(param("rate", 10.0));
        if (kind == "gamma") return Driver::gamma(param("shape", 1.0), param("scale", 1.0));
        if (kind == "variance_gamma") return Driver::variance_gamma(param("nu", 0.5));
    } catch (const ModelError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown driver '" + kind + "' (brownian, compound_poisson, gamma, variance_gamma)");
}

}  // namespace carma
