#ifndef MAXLP_JSON_IO_HPP
#define MAXLP_JSON_IO_HPP

// JSON views of the public result types. ordered_json keeps key order stable
// so repeated runs are byte-identical and diffable.

#include <json.hpp>

#include "maxlp/apps.hpp"
#include "maxlp/lp_model.hpp"
#include "maxlp/maxp.hpp"
#include "maxlp/metrics.hpp"
#include "maxlp/synth.hpp"

namespace maxlp {

using json = nlohmann::ordered_json;

inline json to_json(const LpModel& m) {
    return json{{"order", m.order},
                {"coefficients", m.coefficients},
                {"residual_energy", m.residual_energy}};
}

inline LpModel lp_model_from_json(const json& j) {
    LpModel m;
    m.order = j.at("order").get<std::size_t>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.residual_energy = j.at("residual_energy").get<double>();
    if (m.coefficients.size() != m.order)
        throw ParseError("LpModel JSON: coefficient count does not match order");
    return m;
}

inline json to_json(const MaxPResult& r) {
    return json{{"alpha_chosen", r.alpha_chosen},
                {"gini", r.gini},
                {"causal_model", to_json(r.causal_model)},
                {"anticausal_model", to_json(r.anticausal_model)}};
}

inline json to_json(const SparsityReport& r) {
    return json{{"kurtosis", r.kurtosis}, {"hoyer", r.hoyer}, {"gini", r.gini}, {"n", r.n}};
}

inline json to_json(const PolarityVerdict& v) {
    return json{{"polarity", v.polarity},
                {"differenced_skewness", v.differenced_skewness},
                {"skew_residual", v.skew_residual},
                {"skew_glottal", v.skew_glottal},
                {"low_confidence", v.low_confidence}};
}

inline json to_json(const EigenModel& m) {
    return json{{"frame_length", m.frame_length},
                {"eigenvalues", m.eigenvalues},
                {"cumulative_variance", m.cumulative_variance}};
}

inline json to_json(const SynthSpec& s) {
    json tract = json::array();
    for (const auto& p : s.tract_poles)
        tract.push_back(json{{"magnitude", p.magnitude}, {"frequency_hz", p.frequency_hz}});
    json j{{"rate", s.rate},
           {"duration", s.duration},
           {"f0_start", s.f0_start},
           {"f0_end", s.f0_end},
           {"glottal_pole_mag", s.glottal_pole_mag},
           {"glottal_freq_hz", s.glottal_freq_hz},
           {"tract_poles", tract},
           {"polarity", s.polarity},
           {"seed", s.seed}};
    j["snr_db"] = s.snr_db ? json(*s.snr_db) : json(nullptr);
    return j;
}

inline json to_json(const SynthTruth& t) {
    return json{{"polarity", t.polarity},
                {"causal_filter", to_json(t.causal_filter)},
                {"anticausal_filter", to_json(t.anticausal_filter)},
                {"n_gcis", t.gcis.instants.size()},
                {"rate", t.signal.rate},
                {"n_samples", t.signal.size()}};
}

}  // namespace maxlp

#endif
