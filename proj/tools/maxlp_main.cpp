// maxlp command-line front end: synthetic test material in, residues /
// sparsity metrics / polarity verdicts / excitation eigenvectors /
// benchmark tables out.
//
// Preemphasis convention: s_p(n) = s(n) + alpha * s(n-1) with alpha in
// [-1, 0], so alpha = -1 is the first differencer.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maxlp/json_io.hpp"
#include "maxlp/maxlp.hpp"

namespace fs = std::filesystem;
using maxlp::json;

namespace {

constexpr int kExitError = 2;

struct RunConfig {
    std::string method = "maxp_lp2";
    std::size_t order = 13;            // K
    std::size_t anticausal_order = 2;  // Ka
    std::vector<double> alphas{-1.0, -0.7};
    double frame_ms = 25.0;
    double hop_ms = 5.0;
    double target_rate = 8000.0;
    std::string gci = "auto";          // "auto" or a file path
    std::string format = "json";       // csv | json
    std::uint64_t seed = 0;
    unsigned jobs = 0;                 // 0 = all cores
    bool pcm16 = false;
};

unsigned effective_jobs(unsigned requested) {
    if (const char* env = std::getenv("MAXP_JOBS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return requested == 0 ? maxlp::hardware_jobs() : requested;
}

maxlp::ResidualMethod parse_method(const std::string& name) {
    static const std::map<std::string, maxlp::ResidualMethod> table{
        {"lp2", maxlp::ResidualMethod::lp2},
        {"wlp2", maxlp::ResidualMethod::wlp2},
        {"lp1", maxlp::ResidualMethod::lp1},
        {"maxp_lp2", maxlp::ResidualMethod::maxp_lp2},
        {"maxp_wlp2", maxlp::ResidualMethod::maxp_wlp2},
        {"maxp_lp1", maxlp::ResidualMethod::maxp_lp1},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw maxlp::InvalidArgument("unknown method: " + name);
    return it->second;
}

maxlp::MaxPConfig maxp_config(const RunConfig& rc) {
    maxlp::MaxPConfig cfg;
    cfg.total_order = rc.order;
    cfg.anticausal_order = rc.anticausal_order;
    cfg.alpha_candidates = rc.alphas;
    return cfg;
}

void add_common_flags(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--method", rc.method,
                    "lp2 | wlp2 | lp1 | maxp_lp2 | maxp_wlp2 | maxp_lp1")
        ->capture_default_str();
    cmd->add_option("-K,--order", rc.order, "total prediction order")->capture_default_str();
    cmd->add_option("--ka", rc.anticausal_order, "anticausal order Ka")->capture_default_str();
    cmd->add_option("--alpha", rc.alphas,
                    "preemphasis candidates in [-1, 0]; s_p(n) = s(n) + alpha*s(n-1)")
        ->capture_default_str();
    cmd->add_option("--frame-ms", rc.frame_ms, "analysis window length")->capture_default_str();
    cmd->add_option("--hop-ms", rc.hop_ms, "analysis hop")->capture_default_str();
    cmd->add_option("--rate", rc.target_rate, "analysis sample rate (input is resampled)")
        ->capture_default_str();
    cmd->add_option("--gci", rc.gci, "'auto' or a GCI text file (one instant in s per line)")
        ->capture_default_str();
    cmd->add_option("--format", rc.format, "csv | json")->capture_default_str();
    cmd->add_option("--seed", rc.seed, "seed for any randomized step")->capture_default_str();
    cmd->add_option("-j,--jobs", rc.jobs, "worker threads (0 = all cores, MAXP_JOBS overrides)")
        ->capture_default_str();
}

maxlp::SampleBuffer load_input(const std::string& path, const RunConfig& rc) {
    const maxlp::WavReadResult r = maxlp::read_wav(path);
    if (r.multichannel_warning)
        std::cerr << "warning: " << path << " has " << r.source_channels
                  << " channels, using the first\n";
    if (r.buffer.rate != rc.target_rate) return maxlp::resample(r.buffer, rc.target_rate);
    return r.buffer;
}

// GCIs per configuration: external file, or detector output when any
// weighted analysis needs them.
std::optional<maxlp::GciTrack> gcis_for(const maxlp::SampleBuffer& buffer, const RunConfig& rc,
                                        maxlp::ResidualMethod method) {
    const bool needed = maxlp::base_of(method) == maxlp::BaseMethod::wlp2;
    if (rc.gci != "auto") return maxlp::read_gci_file(rc.gci);
    if (!needed) return std::nullopt;
    return maxlp::detect_gci(buffer, maxlp::estimate_f0(buffer));
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw maxlp::Error("cannot write: " + path);
    out << text;
}

// ---------------------------------------------------------------- synth ---

int cmd_synth(const std::string& out_path, const std::string& out_dir, std::size_t corpus_size,
              bool noiseless, maxlp::SynthSpec spec, std::optional<double> noise_db,
              const std::string& tract_spec, std::uint64_t seed) {
    if (!tract_spec.empty()) {
        spec.tract_poles.clear();
        std::stringstream ss(tract_spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw maxlp::InvalidArgument("tract pole format is mag:freq_hz");
            maxlp::PolePair p;
            p.magnitude = std::stod(item.substr(0, colon));
            p.frequency_hz = std::stod(item.substr(colon + 1));
            spec.tract_poles.push_back(p);
        }
    }
    spec.snr_db = noise_db;
    spec.seed = seed;

    if (corpus_size > 0) {
        if (out_dir.empty())
            throw maxlp::InvalidArgument("--corpus requires --out-dir");
        fs::create_directories(out_dir);
        maxlp::CorpusRanges ranges;
        ranges.rate = spec.rate;
        if (noiseless) ranges.snr_db.reset();

        const auto specs = maxlp::make_corpus_specs(corpus_size, ranges, seed);
        json manifest;
        manifest["seed"] = seed;
        manifest["rate"] = ranges.rate;
        manifest["noiseless"] = noiseless;
        manifest["utterances"] = json::array();
        char name[64];
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const maxlp::SynthTruth truth = maxlp::synthesize(specs[i]);
            std::snprintf(name, sizeof(name), "utt_%04zu", i);
            const std::string stem = std::string(name);
            maxlp::write_wav((fs::path(out_dir) / (stem + ".wav")).string(), truth.signal,
                             maxlp::WavFormat::float32);
            maxlp::write_gci_file(truth.gcis, (fs::path(out_dir) / (stem + ".gci")).string());
            json tj = maxlp::to_json(truth);
            tj["spec"] = maxlp::to_json(specs[i]);
            write_text((fs::path(out_dir) / (stem + ".json")).string(), tj.dump(2) + "\n");

            json entry;
            entry["wav"] = stem + ".wav";
            entry["gci"] = stem + ".gci";
            entry["truth"] = stem + ".json";
            entry["duration"] = truth.signal.duration();
            entry["polarity"] = truth.polarity;
            manifest["utterances"].push_back(entry);
        }
        const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
        write_text(manifest_path, manifest.dump(2) + "\n");
        std::cout << manifest_path << "\n";
        return 0;
    }

    if (out_path.empty()) throw maxlp::InvalidArgument("need --out (or --corpus with --out-dir)");
    const maxlp::SynthTruth truth = maxlp::synthesize(spec);
    maxlp::write_wav(out_path, truth.signal, maxlp::WavFormat::float32);

    const fs::path stem = fs::path(out_path).parent_path() / fs::path(out_path).stem();
    maxlp::write_gci_file(truth.gcis, stem.string() + ".gci");
    json tj = maxlp::to_json(truth);
    tj["spec"] = maxlp::to_json(spec);
    write_text(stem.string() + ".json", tj.dump(2) + "\n");
    std::cout << out_path << "\n";
    return 0;
}

// ------------------------------------------------------------- residual ---

json frame_outcome_json(const maxlp::FrameOutcome& fo, double rate) {
    json j;
    j["index"] = fo.frame_index;
    j["start"] = fo.start_index;
    j["time_s"] = static_cast<double>(fo.start_index) / rate;
    j["ok"] = fo.ok;
    if (fo.model) j["model"] = maxlp::to_json(*fo.model);
    if (fo.causal_model) j["causal_model"] = maxlp::to_json(*fo.causal_model);
    if (fo.anticausal_model) j["anticausal_model"] = maxlp::to_json(*fo.anticausal_model);
    if (fo.alpha_chosen) j["alpha_chosen"] = *fo.alpha_chosen;
    if (fo.gini) j["gini"] = *fo.gini;
    return j;
}

int cmd_residual(const std::string& input, const std::string& out_wav,
                 const std::string& out_frames, const RunConfig& rc) {
    const maxlp::ResidualMethod method = parse_method(rc.method);
    const maxlp::SampleBuffer buffer = load_input(input, rc);
    const auto gcis = gcis_for(buffer, rc, method);

    const maxlp::TrackResult track =
        maxlp::residual_track(buffer, method, maxp_config(rc), gcis ? &*gcis : nullptr,
                              rc.frame_ms, rc.hop_ms, effective_jobs(rc.jobs));
    if (track.too_short) std::cerr << "warning: input shorter than one analysis window\n";

    if (!out_wav.empty())
        maxlp::write_wav(out_wav, track.residual,
                         rc.pcm16 ? maxlp::WavFormat::pcm16 : maxlp::WavFormat::float32);

    if (!out_frames.empty()) {
        json j;
        j["input"] = input;
        j["method"] = rc.method;
        j["rate"] = buffer.rate;
        j["frame_ms"] = rc.frame_ms;
        j["hop_ms"] = rc.hop_ms;
        j["order"] = rc.order;
        j["anticausal_order"] = rc.anticausal_order;
        j["alpha_candidates"] = rc.alphas;
        j["frames"] = json::array();
        for (const auto& fo : track.frames) j["frames"].push_back(frame_outcome_json(fo, buffer.rate));
        write_text(out_frames, j.dump(2) + "\n");
    }
    std::cout << "frames_analyzed " << track.frames.size() << "\n";
    return 0;
}

// -------------------------------------------------------------- metrics ---

int cmd_metrics(const std::string& input, const std::string& out_path, const RunConfig& rc) {
    const maxlp::ResidualMethod method = parse_method(rc.method);
    const maxlp::SampleBuffer buffer = load_input(input, rc);
    const auto gcis = gcis_for(buffer, rc, method);

    const maxlp::TrackResult track =
        maxlp::residual_track(buffer, method, maxp_config(rc), gcis ? &*gcis : nullptr,
                              rc.frame_ms, rc.hop_ms, effective_jobs(rc.jobs));

    const maxlp::FrameSequence fs =
        maxlp::frame_signal(buffer, rc.frame_ms, rc.hop_ms, maxlp::WindowKind::hanning);

    struct Row {
        std::size_t index;
        double time_s;
        maxlp::SparsityReport signal, residual;
        double imp_gini, imp_hoyer, imp_kurtosis;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < fs.frames.size(); ++i) {
        if (!track.frames[i].ok) continue;
        try {
            Row row;
            row.index = i;
            row.time_s = static_cast<double>(fs.frames[i].start_index) / buffer.rate;
            row.signal = maxlp::sparsity_report(fs.frames[i].samples);
            row.residual = maxlp::sparsity_report(track.frames[i].residual);
            row.imp_gini = (row.residual.gini - row.signal.gini) / row.signal.gini;
            row.imp_hoyer = (row.residual.hoyer - row.signal.hoyer) / row.signal.hoyer;
            row.imp_kurtosis =
                (row.residual.kurtosis - row.signal.kurtosis) / row.signal.kurtosis;
            rows.push_back(row);
        } catch (const maxlp::UndefinedMetric&) {
            continue;  // silent or degenerate frame
        }
    }
    if (rows.empty()) throw maxlp::Error("no analyzable frames");

    double mg = 0.0, mh = 0.0, mk = 0.0;
    for (const Row& r : rows) {
        mg += r.imp_gini;
        mh += r.imp_hoyer;
        mk += r.imp_kurtosis;
    }
    const double n = static_cast<double>(rows.size());
    mg /= n;
    mh /= n;
    mk /= n;

    std::string text;
    if (rc.format == "csv") {
        std::ostringstream os;
        os << "frame,time_s,gini_signal,gini_residual,gini_improvement_pct,"
              "hoyer_signal,hoyer_residual,hoyer_improvement_pct,"
              "kurtosis_signal,kurtosis_residual,kurtosis_improvement_pct\n";
        for (const Row& r : rows)
            os << r.index << ',' << fmt_double(r.time_s) << ',' << fmt_double(r.signal.gini)
               << ',' << fmt_double(r.residual.gini) << ',' << fmt_double(100.0 * r.imp_gini)
               << ',' << fmt_double(r.signal.hoyer) << ',' << fmt_double(r.residual.hoyer) << ','
               << fmt_double(100.0 * r.imp_hoyer) << ',' << fmt_double(r.signal.kurtosis) << ','
               << fmt_double(r.residual.kurtosis) << ',' << fmt_double(100.0 * r.imp_kurtosis)
               << '\n';
        os << "mean,,,," << fmt_double(100.0 * mg) << ",,," << fmt_double(100.0 * mh) << ",,,"
           << fmt_double(100.0 * mk) << '\n';
        text = os.str();
    } else {
        json j;
        j["input"] = input;
        j["method"] = rc.method;
        j["frames_used"] = rows.size();
        j["mean_improvement_pct"] = {
            {"gini", 100.0 * mg}, {"hoyer", 100.0 * mh}, {"kurtosis", 100.0 * mk}};
        j["frames"] = json::array();
        for (const Row& r : rows) {
            json e;
            e["index"] = r.index;
            e["time_s"] = r.time_s;
            e["signal"] = maxlp::to_json(r.signal);
            e["residual"] = maxlp::to_json(r.residual);
            e["improvement_pct"] = {{"gini", 100.0 * r.imp_gini},
                                    {"hoyer", 100.0 * r.imp_hoyer},
                                    {"kurtosis", 100.0 * r.imp_kurtosis}};
            j["frames"].push_back(e);
        }
        text = j.dump(2) + "\n";
    }

    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
    return 0;
}

// ------------------------------------------------------------- polarity ---

int cmd_polarity(const std::string& input, const std::string& out_json, const RunConfig& rc) {
    const maxlp::ResidualMethod method = parse_method(rc.method);
    const maxlp::SampleBuffer buffer = load_input(input, rc);
    const auto gcis = gcis_for(buffer, rc, method);

    maxlp::PolarityConfig pcfg;
    pcfg.win_ms = rc.frame_ms;
    pcfg.hop_ms = rc.hop_ms;
    pcfg.jobs = effective_jobs(rc.jobs);
    const maxlp::PolarityVerdict verdict =
        maxlp::detect_polarity(buffer, method, maxp_config(rc), gcis ? &*gcis : nullptr, pcfg);

    const std::string text = maxlp::to_json(verdict).dump(2) + "\n";
    if (out_json.empty())
        std::cout << text;
    else
        write_text(out_json, text);
    return verdict.polarity > 0 ? 0 : 1;
}

// ------------------------------------------------------------------ dsm ---

int cmd_dsm(const std::string& input, const std::string& out_eigen, const std::string& out_meta,
            std::size_t norm_length, double halfwidth_ms, const RunConfig& rc) {
    const maxlp::ResidualMethod method = parse_method(rc.method);
    const maxlp::SampleBuffer buffer = load_input(input, rc);

    const maxlp::F0Track f0 = maxlp::estimate_f0(buffer);
    maxlp::GciTrack gcis = rc.gci != "auto" ? maxlp::read_gci_file(rc.gci)
                                            : maxlp::detect_gci(buffer, f0);
    if (gcis.instants.size() < 2) throw maxlp::InsufficientData("need at least 2 GCIs");

    const maxlp::TrackResult track =
        maxlp::residual_track(buffer, method, maxp_config(rc), &gcis, rc.frame_ms, rc.hop_ms,
                              effective_jobs(rc.jobs));
    const Eigen::MatrixXd frames =
        maxlp::extract_residual_frames(track.residual, gcis, f0, norm_length);
    const maxlp::EigenModel model = maxlp::pca(frames);
    const double concentration =
        maxlp::pulse_concentration(model.eigenvectors.front(), halfwidth_ms, buffer.rate);

    if (!out_eigen.empty()) {
        std::ostringstream os;
        for (const auto& vec : model.eigenvectors) {
            for (std::size_t j = 0; j < vec.size(); ++j)
                os << (j ? "," : "") << fmt_double(vec[j]);
            os << '\n';
        }
        write_text(out_eigen, os.str());
    }
    if (!out_meta.empty()) {
        json j = maxlp::to_json(model);
        j["n_frames"] = frames.rows();
        j["first_eigenvector_concentration"] = concentration;
        j["concentration_halfwidth_ms"] = halfwidth_ms;
        write_text(out_meta, j.dump(2) + "\n");
    }
    std::cout << "frames " << frames.rows() << "\n";
    std::cout << "first_eigenvector_concentration " << fmt_double(concentration) << "\n";
    std::cout << "eigenvectors_to_90pct " << maxlp::eigenvectors_to_variance(model, 0.9) << "\n";
    return 0;
}

// ---------------------------------------------------------------- bench ---

struct BenchAccum {
    // per metric: per-frame relative improvements, aligned across methods
    std::map<std::string, std::vector<double>> improvements;
    double compute_seconds = 0.0;
    double audio_seconds = 0.0;
};

int cmd_bench(const std::string& manifest_path, std::vector<std::string> methods,
              std::vector<std::string> metrics, const std::string& out_path,
              const RunConfig& rc) {
    std::ifstream in(manifest_path);
    if (!in) throw maxlp::Error("cannot open manifest: " + manifest_path);
    json manifest = json::parse(in);
    const fs::path base = fs::path(manifest_path).parent_path();

    if (!manifest.contains("utterances") || manifest["utterances"].empty())
        throw maxlp::Error("empty corpus");

    if (methods.empty())
        methods = {"lp2", "maxp_lp2", "wlp2", "maxp_wlp2", "lp1", "maxp_lp1"};
    if (metrics.empty()) metrics = {"kurtosis", "hoyer", "gini"};

    std::map<std::string, maxlp::SparsityMetric> metric_table{
        {"kurtosis", maxlp::SparsityMetric::kurtosis},
        {"hoyer", maxlp::SparsityMetric::hoyer},
        {"gini", maxlp::SparsityMetric::gini}};
    for (const auto& m : metrics)
        if (!metric_table.count(m)) throw maxlp::InvalidArgument("unknown metric: " + m);

    const unsigned jobs = effective_jobs(rc.jobs);

    // Load the corpus once.
    struct Utt {
        maxlp::SampleBuffer buffer;
        maxlp::GciTrack gcis;
    };
    std::vector<Utt> corpus;
    for (const auto& entry : manifest["utterances"]) {
        Utt u;
        u.buffer = load_input((base / entry.at("wav").get<std::string>()).string(), rc);
        if (entry.contains("gci"))
            u.gcis = maxlp::read_gci_file((base / entry.at("gci").get<std::string>()).string());
        corpus.push_back(std::move(u));
    }

    std::map<std::string, BenchAccum> results;
    for (const std::string& method_name : methods) {
        const maxlp::ResidualMethod method = parse_method(method_name);
        BenchAccum acc;
        for (auto& m : metrics) acc.improvements[m] = {};

        for (const Utt& u : corpus) {
            const maxlp::GciTrack* gcis =
                u.gcis.instants.empty() ? nullptr : &u.gcis;

            const auto t0 = std::chrono::steady_clock::now();
            const maxlp::TrackResult track = maxlp::residual_track(
                u.buffer, method, maxp_config(rc), gcis, rc.frame_ms, rc.hop_ms, jobs);
            const auto t1 = std::chrono::steady_clock::now();
            acc.compute_seconds += std::chrono::duration<double>(t1 - t0).count();
            acc.audio_seconds += u.buffer.duration();

            const maxlp::FrameSequence fs = maxlp::frame_signal(
                u.buffer, rc.frame_ms, rc.hop_ms, maxlp::WindowKind::hanning);
            for (std::size_t i = 0; i < fs.frames.size(); ++i) {
                for (const auto& m : metrics) {
                    double imp = std::numeric_limits<double>::quiet_NaN();
                    if (track.frames[i].ok) {
                        try {
                            imp = maxlp::sparsity_improvement(fs.frames[i].samples,
                                                              track.frames[i].residual,
                                                              metric_table.at(m));
                        } catch (const maxlp::UndefinedMetric&) {
                        }
                    }
                    acc.improvements[m].push_back(imp);
                }
            }
        }
        results[method_name] = std::move(acc);
    }

    // Pairwise stats: each maxp method against its conventional base.
    auto base_name = [](const std::string& m) -> std::string {
        if (m.rfind("maxp_", 0) == 0) return m.substr(5);
        return "";
    };

    std::ostringstream os;
    os << "metric,method,mean_improvement_pct,p_value_vs_base,rct_pct\n";
    for (const auto& metric_name : metrics) {
        for (const auto& method_name : methods) {
            const BenchAccum& acc = results.at(method_name);
            const auto& imps = acc.improvements.at(metric_name);

            std::vector<double> defined;
            for (double v : imps)
                if (std::isfinite(v)) defined.push_back(v);
            const double mean_imp = defined.empty() ? 0.0 : maxlp::mean(defined);

            std::string p_text;
            const std::string base_method = base_name(method_name);
            if (!base_method.empty() && results.count(base_method)) {
                const auto& base_imps = results.at(base_method).improvements.at(metric_name);
                std::vector<double> a, b;
                for (std::size_t i = 0; i < imps.size() && i < base_imps.size(); ++i)
                    if (std::isfinite(imps[i]) && std::isfinite(base_imps[i])) {
                        a.push_back(imps[i]);
                        b.push_back(base_imps[i]);
                    }
                if (a.size() >= 2) p_text = fmt_double(maxlp::paired_t_test(a, b).p_value);
            }

            const double rct = 100.0 * acc.compute_seconds / acc.audio_seconds;
            os << metric_name << ',' << method_name << ',' << fmt_double(100.0 * mean_imp) << ','
               << p_text << ',' << fmt_double(rct) << '\n';
        }
    }

    if (out_path.empty())
        std::cout << os.str();
    else
        write_text(out_path, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maxlp: sparse linear prediction of speech with maximum-phase modeling"};
    app.require_subcommand(1);

    RunConfig rc;

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic test material");
    std::string synth_out, synth_out_dir, synth_tract;
    std::size_t corpus_size = 0;
    bool noiseless = false;
    maxlp::SynthSpec spec;
    spec.tract_poles = {{0.95, 600.0}, {0.93, 1500.0}, {0.9, 2600.0}};
    std::optional<double> noise_db;
    double noise_db_value = -1.0;
    std::uint64_t synth_seed = 0;
    synth->add_option("--out", synth_out, "output WAV (single-utterance mode)");
    synth->add_option("--out-dir", synth_out_dir, "output directory (corpus mode)");
    synth->add_option("--corpus", corpus_size, "number of corpus utterances");
    synth->add_flag("--noiseless", noiseless, "corpus mode: no additive noise");
    synth->add_option("--duration", spec.duration, "seconds")->capture_default_str();
    synth->add_option("--f0", spec.f0_start, "Hz")->capture_default_str();
    double f0_end = -1.0;
    synth->add_option("--f0-end", f0_end, "Hz (linear ramp; default = --f0)");
    synth->add_option("--fg", spec.glottal_freq_hz, "glottal formant Hz")->capture_default_str();
    synth->add_option("--glottal-mag", spec.glottal_pole_mag, "glottal pole magnitude [0,1)")
        ->capture_default_str();
    synth->add_option("--tract", synth_tract, "tract pole pairs 'mag:freq,mag:freq,...'");
    synth->add_option("--polarity", spec.polarity, "+1 or -1")->capture_default_str();
    auto* noise_opt = synth->add_option("--noise-db", noise_db_value, "SNR in dB (omit for clean)");
    synth->add_option("--seed", synth_seed, "random seed")->capture_default_str();
    synth->add_option("--rate", spec.rate, "sample rate")->capture_default_str();

    // residual
    auto* residual = app.add_subcommand("residual", "per-frame residual extraction");
    std::string res_input, res_out_wav, res_out_frames;
    residual->add_option("input", res_input, "input WAV")->required();
    residual->add_option("--out", res_out_wav, "residual WAV path");
    residual->add_option("--frames", res_out_frames, "per-frame JSON path");
    residual->add_flag("--pcm16", rc.pcm16, "write PCM16 instead of float32");
    add_common_flags(residual, rc);

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "sparsity metrics of the residual");
    std::string met_input, met_out;
    metrics_cmd->add_option("input", met_input, "input WAV")->required();
    metrics_cmd->add_option("--out", met_out, "report path (default stdout)");
    add_common_flags(metrics_cmd, rc);

    // polarity
    auto* polarity = app.add_subcommand("polarity", "speech polarity detection (exit 0 = +1, 1 = -1)");
    std::string pol_input, pol_out;
    polarity->add_option("input", pol_input, "input WAV")->required();
    polarity->add_option("--json", pol_out, "verdict JSON path (default stdout)");
    add_common_flags(polarity, rc);

    // dsm
    auto* dsm = app.add_subcommand("dsm", "excitation eigenvectors from GCI-synchronous frames");
    std::string dsm_input, dsm_out_eigen, dsm_out_meta;
    std::size_t norm_length = 64;
    double halfwidth_ms = 0.5;
    dsm->add_option("input", dsm_input, "input WAV")->required();
    dsm->add_option("--out-eigen", dsm_out_eigen, "eigenvector CSV (one per row)");
    dsm->add_option("--out-meta", dsm_out_meta, "eigenvalue/variance JSON");
    dsm->add_option("--norm-length", norm_length, "normalized frame length")->capture_default_str();
    dsm->add_option("--halfwidth-ms", halfwidth_ms, "concentration window half-width")
        ->capture_default_str();
    add_common_flags(dsm, rc);

    // bench
    auto* bench = app.add_subcommand("bench", "corpus benchmark table (sparsity, t-tests, RCT)");
    std::string bench_manifest, bench_out;
    std::vector<std::string> bench_methods, bench_metrics;
    bench->add_option("manifest", bench_manifest, "corpus manifest JSON")->required();
    bench->add_option("--methods", bench_methods, "subset of the six methods")->delimiter(',');
    bench->add_option("--metrics", bench_metrics, "subset of kurtosis,hoyer,gini")->delimiter(',');
    bench->add_option("--out", bench_out, "CSV path (default stdout)");
    add_common_flags(bench, rc);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            if (noise_opt->count() > 0) noise_db = noise_db_value;
            if (f0_end >= 0.0)
                spec.f0_end = f0_end;
            else
                spec.f0_end = spec.f0_start;
            return cmd_synth(synth_out, synth_out_dir, corpus_size, noiseless, spec, noise_db,
                             synth_tract, synth_seed);
        }
        if (residual->parsed()) return cmd_residual(res_input, res_out_wav, res_out_frames, rc);
        if (metrics_cmd->parsed()) return cmd_metrics(met_input, met_out, rc);
        if (polarity->parsed()) return cmd_polarity(pol_input, pol_out, rc);
        if (dsm->parsed())
            return cmd_dsm(dsm_input, dsm_out_eigen, dsm_out_meta, norm_length, halfwidth_ms, rc);
        if (bench->parsed())
            return cmd_bench(bench_manifest, bench_methods, bench_metrics, bench_out, rc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
