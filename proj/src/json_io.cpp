#include "ctrw/json_io.hpp"

namespace ctrw {

using nlohmann::json;

json to_json(const LevyMeasure& m) {
    switch (m.kind) {
        case MeasureKind::StablePower:
            return json{{"kind", "stable_power"}, {"alpha", m.alpha}, {"scale", m.scale}};
        case MeasureKind::ScaledDistribution:
            return json{{"kind", "scaled_distribution"},
                        {"rate", m.rate},
                        {"jump_scale", m.jump_scale},
                        {"base", to_json(*m.base)}};
        case MeasureKind::Atomic: {
            json atoms = json::array();
            for (const auto& [loc, mass] : m.atoms)
                atoms.push_back(json{{"location", loc}, {"mass", mass}});
            return json{{"kind", "atomic"}, {"atoms", atoms}};
        }
    }
    return {};
}

LevyMeasure levy_measure_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "stable_power")
        return LevyMeasure::stable_power(j.at("alpha").get<double>(),
                                         j.at("scale").get<double>());
    if (kind == "scaled_distribution")
        return LevyMeasure::scaled_distribution(
            std::make_shared<DistributionSpec>(distribution_from_json(j.at("base"))),
            j.at("rate").get<double>(),
            j.value("jump_scale", 1.0));
    if (kind == "atomic") {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.emplace_back(a.at("location").get<double>(), a.at("mass").get<double>());
        return atoms.empty() ? LevyMeasure::null_measure() : LevyMeasure::atomic(atoms);
    }
    throw ConfigInvalid("unknown measure kind '" + kind + "'");
}

json to_json(const BernsteinSymbol& s) {
    return json{{"drift", s.drift},
                {"measure", to_json(s.measure)},
                {"unbounded_certified", s.unbounded_certified}};
}

BernsteinSymbol bernstein_symbol_from_json(const json& j) {
    BernsteinSymbol s;
    s.drift = j.at("drift").get<double>();
    s.measure = levy_measure_from_json(j.at("measure"));
    s.certify_unbounded();
    return s;
}

json to_json(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Pareto:
            return json{{"kind", "pareto"}, {"alpha", d.alpha}, {"x_m", d.x_m}};
        case DistKind::PositiveStable:
            return json{{"kind", "positive_stable"}, {"alpha", d.alpha}, {"t", d.t_scale}};
        case DistKind::Exponential:
            return json{{"kind", "exponential"}, {"rate", d.rate}};
        case DistKind::Truncated:
            return json{{"kind", "truncated"}, {"m", d.m}, {"base", to_json(*d.base)}};
        case DistKind::PhiMapped:
            return json{{"kind", "phi_mapped"},
                        {"base", to_json(*d.base)},
                        {"psi", to_json(*d.psi)}};
        case DistKind::Dirac:
            return json{{"kind", "dirac"}, {"location", d.atom}};
        case DistKind::FiniteMeanGeneric:
            throw ConfigInvalid("generic tail distributions have no JSON form");
    }
    return {};
}

DistributionSpec distribution_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "pareto")
        return DistributionSpec::pareto(j.at("alpha").get<double>(), j.at("x_m").get<double>());
    if (kind == "positive_stable")
        return DistributionSpec::positive_stable(j.at("alpha").get<double>(),
                                                 j.value("t", 1.0));
    if (kind == "exponential") return DistributionSpec::exponential(j.at("rate").get<double>());
    if (kind == "truncated")
        return DistributionSpec::truncated(
            std::make_shared<DistributionSpec>(distribution_from_json(j.at("base"))),
            j.at("m").get<double>());
    if (kind == "phi_mapped")
        return DistributionSpec::phi_mapped(
            std::make_shared<DistributionSpec>(distribution_from_json(j.at("base"))),
            std::make_shared<BernsteinSymbol>(bernstein_symbol_from_json(j.at("psi"))));
    if (kind == "dirac") return DistributionSpec::dirac(j.at("location").get<double>());
    throw ConfigInvalid("unknown distribution kind '" + kind + "'");
}

json to_json(const CmReport& r) {
    json per = json::array();
    for (const auto& o : r.per_order)
        per.push_back(json{{"order", o.order},
                           {"worst", o.worst_value},
                           {"at", o.worst_at},
                           {"pass", o.pass}});
    return json{{"pass", r.pass}, {"tolerance", r.tolerance}, {"per_order", per}};
}

json to_json(const InjectionBoundReport& r) {
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back(json{{"s", p.s}, {"lower", p.lower}, {"ratio", p.ratio}, {"upper", p.upper}});
    return json{{"pass", r.pass}, {"max_violation", r.max_violation}, {"points", pts}};
}

json to_json(const StepPath& p) {
    return json{{"horizon", p.horizon},
                {"dim", p.dim},
                {"initial", p.initial},
                {"epochs", p.epochs},
                {"values", p.values}};
}

StepPath step_path_from_json(const json& j) {
    StepPath p;
    p.horizon = j.at("horizon").get<double>();
    p.dim = j.value("dim", size_t{1});
    p.initial = j.at("initial").get<std::vector<double>>();
    p.epochs = j.at("epochs").get<std::vector<double>>();
    p.values = j.at("values").get<std::vector<double>>();
    p.validate();
    return p;
}

} // namespace ctrw
