#include "qkdsim/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qkdsim/attacks.hpp"
#include "qkdsim/codes.hpp"
#include "qkdsim/qec_experiments.hpp"
#include "qkdsim/qkd.hpp"
#include "qkdsim/sidechannel.hpp"
#include "qkdsim/statevector.hpp"

namespace qkdsim {

const char* kToolVersion = "0.1.0";

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(ss.str())));
    return std::string("fnv1a64:") + buf;
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

double need_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ConfigError("missing numeric '" + key + "' in " + where);
    return obj[key].get<double>();
}

ChannelSpec parse_channel_spec(const json& j);

ChannelSeq parse_channel_seq(const json& j) {
    if (j.is_array()) {
        ChannelSeq seq;
        for (const json& item : j) seq.push_back(parse_channel_spec(item));
        return seq;
    }
    if (j.is_object() && j.contains("type") && j["type"] == "sequence") {
        check_keys(j, {"type", "channels"}, "channel 'sequence'");
        if (!j.contains("channels") || !j["channels"].is_array())
            throw ConfigError("sequence channel needs 'channels' array");
        ChannelSeq seq;
        for (const json& item : j["channels"]) seq.push_back(parse_channel_spec(item));
        return seq;
    }
    ChannelSpec spec = parse_channel_spec(j);
    if (std::get_if<PerQubit>(&spec.v) != nullptr)
        throw ConfigError("per_qubit channel not allowed in a sequence");
    return {spec};
}

ChannelSpec parse_channel_spec(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ConfigError("channel must be an object with a 'type'");
    std::string type = j["type"].get<std::string>();
    const std::string where = "channel '" + type + "'";
    if (type == "bitflip") {
        check_keys(j, {"type", "p"}, where);
        return ChannelSpec{BitFlip{need_number(j, "p", where)}};
    }
    if (type == "depolarizing1") {
        check_keys(j, {"type", "p"}, where);
        return ChannelSpec{Depolarizing1{need_number(j, "p", where)}};
    }
    if (type == "depolarizing2") {
        check_keys(j, {"type", "p"}, where);
        return ChannelSpec{Depolarizing2{need_number(j, "p", where)}};
    }
    if (type == "pauli") {
        check_keys(j, {"type", "px", "py", "pz"}, where);
        return ChannelSpec{PauliChannel{need_number(j, "px", where),
                                        need_number(j, "py", where),
                                        need_number(j, "pz", where)}};
    }
    if (type == "twirled_ad") {
        check_keys(j, {"type", "gamma"}, where);
        return ChannelSpec{TwirledAmplitudeDamping{need_number(j, "gamma", where)}};
    }
    if (type == "dephasing") {
        check_keys(j, {"type", "p"}, where);
        return ChannelSpec{Dephasing{need_number(j, "p", where)}};
    }
    if (type == "heralded_erase") {
        check_keys(j, {"type", "p"}, where);
        return ChannelSpec{HeraldedErase{need_number(j, "p", where)}};
    }
    if (type == "deterministic") {
        check_keys(j, {"type", "pauli"}, where);
        if (!j.contains("pauli") || !j["pauli"].is_string())
            throw ConfigError("deterministic channel needs a 'pauli' string");
        return ChannelSpec{DeterministicPauli{PauliString::from_str(j["pauli"].get<std::string>())}};
    }
    if (type == "per_qubit") {
        check_keys(j, {"type", "channels"}, where);
        if (!j.contains("channels") || !j["channels"].is_array())
            throw ConfigError("per_qubit channel needs 'channels' array");
        PerQubit pq;
        for (const json& item : j["channels"]) pq.channels.push_back(parse_channel_seq(item));
        return ChannelSpec{pq};
    }
    throw ConfigError("unknown channel type '" + type + "'");
}

// Channel entry for the Steane monitor: uniform seq or per-qubit list.
std::vector<ChannelSeq> parse_monitor_channel(const json& j) {
    if (j.is_object() && j.contains("type") && j["type"] == "per_qubit") {
        ChannelSpec spec = parse_channel_spec(j);
        return std::get<PerQubit>(spec.v).channels;
    }
    return {parse_channel_seq(j)};
}

ClonerSpec parse_attack(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ConfigError("attack must be an object with a 'type'");
    std::string type = j["type"].get<std::string>();
    if (type == "pccm") {
        check_keys(j, {"type", "theta"}, "attack 'pccm'");
        return PccmSpec{need_number(j, "theta", "attack")};
    }
    if (type == "imbalanced") {
        check_keys(j, {"type", "psi", "phi", "tuned_p"}, "attack 'imbalanced'");
        double psi = need_number(j, "psi", "attack");
        double phi;
        if (j.contains("phi")) phi = need_number(j, "phi", "attack");
        else if (j.contains("tuned_p"))
            phi = optimal_phi(psi, need_number(j, "tuned_p", "attack"));
        else throw ConfigError("imbalanced attack needs 'phi' or 'tuned_p'");
        return ImbalancedSpec{psi, phi};
    }
    throw ConfigError("unknown attack type '" + type + "'");
}

struct Artifacts {
    json summary;
    std::string results_csv;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

json correlation_json(const CorrelationEstimate& est) {
    return json{{"value", est.value}, {"n_sifted", est.n_sifted}, {"std_err", est.std_err}};
}

// ---------------------------------------------------------------------
// experiment implementations
// ---------------------------------------------------------------------

Artifacts run_qkd(const json& cfg, const std::string& experiment,
                  uint64_t seed, uint64_t rounds, int workers) {
    QkdParams params;
    params.rounds = rounds;
    params.seed = seed;
    params.workers = workers;
    if (cfg.contains("attack")) params.attack = parse_attack(cfg["attack"]);
    if (cfg.contains("channel")) params.channel_noise = parse_channel_seq(cfg["channel"]);
    if (cfg.contains("p_d")) params.p_d = cfg["p_d"].get<double>();

    auto records = experiment == "bb84" ? run_bb84(params) : run_bbm92(params);
    auto sifted = sift(records);

    std::ostringstream csv;
    write_records_csv(csv, records);

    Artifacts art;
    art.results_csv = csv.str();
    art.summary["experiment"] = experiment;
    art.summary["csv_schema"] = "qkd_rounds_v1";
    art.summary["n_rounds"] = records.size();
    art.summary["n_sifted"] = sifted.size();
    if (!sifted.empty()) {
        art.summary["C_AB"] = correlation_json(correlation(sifted, Pair::AB));
        art.summary["C_AB_Z"] = correlation_json(correlation(sifted, Pair::AB, Basis::Z));
        art.summary["C_AB_X"] = correlation_json(correlation(sifted, Pair::AB, Basis::X));
        if (params.attack) {
            art.summary["C_AE"] = correlation_json(correlation(sifted, Pair::AE));
            art.summary["C_AE_Z"] = correlation_json(correlation(sifted, Pair::AE, Basis::Z));
            art.summary["C_AE_X"] = correlation_json(correlation(sifted, Pair::AE, Basis::X));
            art.summary["C_BE"] = correlation_json(correlation(sifted, Pair::BE));
        }
        auto qber = qber_abort_check(sifted);
        art.summary["qber"] = qber.qber;
        art.summary["abort"] = qber.abort;
    }
    return art;
}

Artifacts run_qcl(const json& cfg, uint64_t seed, int workers) {
    QclConfig qc;
    qc.seed = seed;
    if (cfg.contains("alpha")) qc.alpha = cfg["alpha"].get<double>();
    if (cfg.contains("f")) qc.target_fidelity = cfg["f"].get<double>();
    if (cfg.contains("shots_per_config")) qc.shots_per_config = cfg["shots_per_config"].get<int>();
    if (cfg.contains("max_iterations")) qc.max_iterations = cfg["max_iterations"].get<int>();
    if (cfg.contains("initial_theta")) qc.initial_theta = cfg["initial_theta"].get<double>();

    // Shot-based evaluator: shots_per_config sifted runs for each of the
    // four (bit, basis) configurations.
    uint64_t eval_counter = 0;
    (void)workers;
    auto evaluator = [&](double theta) -> std::pair<double, double> {
        uint64_t eval_seed = qc.seed ^ (0x9E3779B97F4A7C15ull * ++eval_counter);
        uint64_t ab = 0, ae = 0, n = 0;
        for (int bit = 0; bit < 2; ++bit) {
            for (int basis = 0; basis < 2; ++basis) {
                Basis b = basis ? Basis::X : Basis::Z;
                Circuit c = build_bb84_round(bit, b, b, PccmSpec{theta},
                                             std::nullopt, 0.0);
                for (int s = 0; s < qc.shots_per_config; ++s) {
                    ShotRng rng(eval_seed, (uint64_t(bit * 2 + basis) << 32) | s);
                    ShotRecord shot = run_shot(c, rng);
                    ++n;
                    if (shot.bit(0) == (bit != 0)) ++ab;
                    if (shot.bit(1) == (bit != 0)) ++ae;
                }
            }
        }
        return {static_cast<double>(ab) / n, static_cast<double>(ae) / n};
    };
    QclResult result = qcl_optimize(qc, evaluator);

    std::ostringstream csv;
    csv << "iteration,theta,loss,F_AB,F_AE\n";
    for (size_t i = 0; i < result.trace.size(); ++i) {
        const QclIterate& it = result.trace[i];
        csv << i << ',' << fmt(it.theta) << ',' << fmt(it.loss) << ','
            << fmt(it.f_ab) << ',' << fmt(it.f_ae) << '\n';
    }

    Artifacts art;
    art.results_csv = csv.str();
    art.summary["experiment"] = "qcl";
    art.summary["csv_schema"] = "qcl_trace_v1";
    art.summary["theta_star"] = result.theta_star;
    art.summary["iterations"] = result.trace.size();
    art.summary["f_ab_exact"] = pccm_fidelity_ab(result.theta_star);
    art.summary["f_ae_exact"] = pccm_fidelity_ae(result.theta_star);
    return art;
}

Artifacts run_qec422(const json& cfg, uint64_t seed, uint64_t shots, int workers) {
    if (!cfg.contains("channel")) throw ConfigError("qec422 needs a 'channel'");
    ChannelSeq channel = parse_channel_seq(cfg["channel"]);
    std::vector<int> m_grid;
    if (cfg.contains("m_grid"))
        for (const json& v : cfg["m_grid"]) m_grid.push_back(v.get<int>());
    else if (cfg.contains("m")) m_grid.push_back(cfg["m"].get<int>());
    else m_grid = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    double p_d = cfg.contains("p_d") ? cfg["p_d"].get<double>() : 0.0;
    bool noise_on_spam = cfg.contains("noise_on_spam")
        ? cfg["noise_on_spam"].get<bool>() : true;

    std::ostringstream csv;
    csv << "m,acceptance,flip_lq1,flip_lq2,stderr_acceptance,stderr_flip_lq1,stderr_flip_lq2\n";
    json points = json::array();
    for (size_t i = 0; i < m_grid.size(); ++i) {
        Qec422Params params;
        params.channel = channel;
        params.m = m_grid[i];
        params.p_d = p_d;
        params.noise_on_spam = noise_on_spam;
        params.shots = shots;
        params.seed = seed + i * 0x10000000ull;
        params.workers = workers;
        RoundStats stats = run_422(params);
        auto se = [](double rate, uint64_t n) {
            return n == 0 ? 0.0 : std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
        };
        csv << stats.m << ',' << fmt(stats.acceptance_rate) << ','
            << fmt(stats.flip_rate_lq1) << ',' << fmt(stats.flip_rate_lq2) << ','
            << fmt(se(stats.acceptance_rate, stats.shots)) << ','
            << fmt(se(stats.flip_rate_lq1, stats.accepted_shots)) << ','
            << fmt(se(stats.flip_rate_lq2, stats.accepted_shots)) << '\n';
        points.push_back(json{{"m", stats.m},
                              {"acceptance", stats.acceptance_rate},
                              {"flip_lq1", stats.flip_rate_lq1},
                              {"flip_lq2", stats.flip_rate_lq2},
                              {"accepted", stats.accepted_shots}});
    }
    Artifacts art;
    art.results_csv = csv.str();
    art.summary["experiment"] = "qec422";
    art.summary["csv_schema"] = "qec422_v1";
    art.summary["points"] = points;
    return art;
}

Artifacts run_qec422_scaling(const json& cfg, uint64_t seed, uint64_t shots, int workers) {
    ScalingParams params;
    params.seed = seed;
    params.shots = shots;
    params.workers = workers;
    if (cfg.contains("lambda_grid"))
        for (const json& v : cfg["lambda_grid"]) params.lambda_grid.push_back(v.get<double>());
    else
        params.lambda_grid = {0.01, 0.0178, 0.0316, 0.0562, 0.1, 0.178, 0.316, 0.562, 1.0};
    if (cfg.contains("p")) params.p = cfg["p"].get<double>();
    if (cfg.contains("p_d")) params.p_d = cfg["p_d"].get<double>();
    if (cfg.contains("circuit_noise")) params.circuit_noise = cfg["circuit_noise"].get<bool>();
    if (cfg.contains("channel_kind")) {
        std::string kind = cfg["channel_kind"].get<std::string>();
        if (kind == "bitflip") params.channel = ScalingChannel::BitFlip;
        else if (kind == "depolarizing") params.channel = ScalingChannel::Depolarizing;
        else throw ConfigError("channel_kind must be 'bitflip' or 'depolarizing'");
    }
    auto points = scaling_sweep(params);

    std::ostringstream csv;
    csv << "lambda,p_L,acceptance,physical_ref\n";
    std::vector<double> xs, ys;
    for (const ScalingPoint& pt : points) {
        csv << fmt(pt.lambda) << ',' << fmt(pt.p_l) << ',' << fmt(pt.acceptance) << ','
            << fmt(pt.physical_ref) << '\n';
        if (pt.lambda >= 0.0099 && pt.lambda <= 0.1001 && pt.p_l > 0.0) {
            xs.push_back(pt.lambda);
            ys.push_back(pt.p_l);
        }
    }
    Artifacts art;
    art.results_csv = csv.str();
    art.summary["experiment"] = "qec422-scaling";
    art.summary["csv_schema"] = "qec422_scaling_v1";
    if (xs.size() >= 2) art.summary["low_lambda_slope"] = fit_loglog_slope(xs, ys);
    return art;
}

Artifacts run_steane(const json& cfg, uint64_t seed, uint64_t shots, int workers) {
    if (!cfg.contains("channel")) throw ConfigError("steane-monitor needs a 'channel'");
    SteaneParams params;
    params.channel = parse_monitor_channel(cfg["channel"]);
    params.seed = seed;
    params.shots = shots;
    params.workers = workers;
    if (cfg.contains("rounds_max")) params.rounds_max = cfg["rounds_max"].get<int>();
    if (cfg.contains("p_d")) params.p_d = cfg["p_d"].get<double>();
    if (cfg.contains("noise_on_spam")) params.noise_on_spam = cfg["noise_on_spam"].get<bool>();
    if (cfg.contains("stabilizer_order")) {
        std::string order = cfg["stabilizer_order"].get<std::string>();
        if (order == "zx") params.z_stabilizers_first = true;
        else if (order == "xz") params.z_stabilizers_first = false;
        else throw ConfigError("stabilizer_order must be 'zx' or 'xz'");
    }
    SteaneMonitorResult result = run_steane_monitor(params);

    std::ostringstream csv;
    csv << "syndrome,count,round_of_detection\n";
    for (int r = 0; r < params.rounds_max; ++r)
        for (int v = 1; v < 64; ++v)
            if (result.histogram.per_round[r][v] > 0)
                csv << syndrome_string(v, 6) << ',' << result.histogram.per_round[r][v]
                    << ',' << (r + 1) << '\n';
    if (result.histogram.erasure_discards > 0)
        csv << "erasure," << result.histogram.erasure_discards << ",0\n";

    Artifacts art;
    art.results_csv = csv.str();
    art.summary["experiment"] = "steane-monitor";
    art.summary["csv_schema"] = "steane_monitor_v1";
    art.summary["acceptance"] = result.acceptance;
    art.summary["flip_rate"] = result.flip_rate;
    art.summary["accepted"] = result.accepted;
    art.summary["erasure_discards"] = result.histogram.erasure_discards;
    json top = json::array();
    auto order = top_syndromes(result.histogram);
    for (size_t i = 0; i < order.size() && i < 8; ++i)
        top.push_back(json{{"syndrome", syndrome_string(order[i].second, 6)},
                           {"count", order[i].first}});
    art.summary["top_syndromes"] = top;
    return art;
}

Artifacts run_sidechannel(const json& cfg, uint64_t seed) {
    std::string model = cfg.contains("model") ? cfg["model"].get<std::string>()
                                              : std::string("quench");
    std::vector<double> durations;
    if (cfg.contains("durations"))
        for (const json& v : cfg["durations"]) durations.push_back(v.get<double>());
    else durations = {0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0};
    uint64_t shots = cfg.contains("shots_per_point")
        ? cfg["shots_per_point"].get<uint64_t>() : 400;

    std::ostringstream csv;
    csv << "duration_us,p_dark_input0,p_dark_input1\n";
    json rows = json::array();
    for (size_t d = 0; d < durations.size(); ++d) {
        double p_dark[2] = {0.0, 0.0};
        if (model == "double_detection") {
            DetectorModel det;
            if (cfg.contains("bright_rate")) det.bright_rate = cfg["bright_rate"].get<double>();
            if (cfg.contains("dark_rate")) det.dark_rate = cfg["dark_rate"].get<double>();
            if (cfg.contains("threshold")) det.threshold = cfg["threshold"].get<int>();
            for (int state = 0; state < 2; ++state) {
                uint64_t dark = 0;
                for (uint64_t s = 0; s < shots; ++s) {
                    ShotRng rng(seed, (d * 2 + state) * shots + s);
                    auto dd = double_detection(det, state, 1100.0, durations[d], rng);
                    dark += dd.e_dark;
                }
                p_dark[state] = static_cast<double>(dark) / static_cast<double>(shots);
            }
        } else {
            BiasModel bias = model == "pump" ? BiasModel::pump() : BiasModel::quench();
            if (cfg.contains("tau")) bias.tau_us = cfg["tau"].get<double>();
            for (int state = 0; state < 2; ++state) {
                uint64_t dark = 0;
                for (uint64_t s = 0; s < shots; ++s) {
                    ShotRng rng(seed, (d * 2 + state) * shots + s);
                    if (rng.bernoulli(apply_bias(bias, state, durations[d]))) ++dark;
                }
                p_dark[state] = static_cast<double>(dark) / static_cast<double>(shots);
            }
        }
        csv << fmt(durations[d]) << ',' << fmt(p_dark[0]) << ',' << fmt(p_dark[1]) << '\n';
        rows.push_back(json{{"duration_us", durations[d]},
                            {"p_dark_input0", p_dark[0]},
                            {"p_dark_input1", p_dark[1]}});
    }
    Artifacts art;
    art.results_csv = csv.str();
    art.summary["experiment"] = "sidechannel";
    art.summary["csv_schema"] = "sidechannel_v1";
    art.summary["model"] = model;
    art.summary["points"] = rows;
    return art;
}

const std::set<std::string> kCommonKeys = {
    "experiment", "seed", "label", "workers"};

void validate_config(const json& cfg) {
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
        throw ConfigError("config needs an 'experiment' string");
    std::string exp = cfg["experiment"].get<std::string>();
    std::set<std::string> allowed = kCommonKeys;
    if (exp == "bb84" || exp == "bbm92") {
        allowed.insert({"rounds", "attack", "channel", "p_d"});
    } else if (exp == "qcl") {
        allowed.insert({"alpha", "f", "shots_per_config", "max_iterations", "initial_theta"});
    } else if (exp == "qec422") {
        allowed.insert({"shots", "channel", "m", "m_grid", "p_d", "noise_on_spam"});
    } else if (exp == "qec422-scaling") {
        allowed.insert({"shots", "lambda_grid", "p", "p_d", "circuit_noise", "channel_kind"});
    } else if (exp == "steane-monitor") {
        allowed.insert({"shots", "channel", "rounds_max", "p_d", "noise_on_spam",
                        "stabilizer_order"});
    } else if (exp == "sidechannel") {
        allowed.insert({"model", "durations", "shots_per_point", "bright_rate",
                        "dark_rate", "threshold", "tau"});
    } else {
        throw ConfigError("unknown experiment '" + exp + "'");
    }
    check_keys(cfg, allowed, "config");
}

Artifacts dispatch(const json& cfg, const RunOptions& options) {
    validate_config(cfg);
    std::string exp = cfg["experiment"].get<std::string>();
    uint64_t seed = options.seed ? *options.seed
        : (cfg.contains("seed") ? cfg["seed"].get<uint64_t>() : 0);
    int workers = options.workers ? *options.workers
        : (cfg.contains("workers") ? cfg["workers"].get<int>() : 1);
    uint64_t shots = options.shots ? *options.shots
        : (cfg.contains("shots") ? cfg["shots"].get<uint64_t>() : 1000000);
    uint64_t rounds = options.rounds ? *options.rounds
        : (cfg.contains("rounds") ? cfg["rounds"].get<uint64_t>() : 4000);

    if (exp == "bb84" || exp == "bbm92") return run_qkd(cfg, exp, seed, rounds, workers);
    if (exp == "qcl") return run_qcl(cfg, seed, workers);
    if (exp == "qec422") return run_qec422(cfg, seed, shots, workers);
    if (exp == "qec422-scaling") return run_qec422_scaling(cfg, seed, shots, workers);
    if (exp == "steane-monitor") return run_steane(cfg, seed, shots, workers);
    return run_sidechannel(cfg, seed);
}

fs::path prepare_run_dir(const json& cfg, const RunOptions& options) {
    std::string exp = cfg["experiment"].get<std::string>();
    std::string label = options.label ? *options.label
        : (cfg.contains("label") ? cfg["label"].get<std::string>() : std::string("run"));
    fs::path dir = fs::path(options.out_dir) / exp / label;
    if (fs::exists(dir)) {
        if (!options.force)
            throw ConfigError("output path exists (use --force): " + dir.string());
        fs::remove_all(dir);
    }
    fs::create_directories(dir);
    return dir;
}

RunResult finalize(const json& cfg, const Artifacts& art,
                   fs::path dir, double wall_seconds, uint64_t seed_used) {
    write_text(dir / "results.csv", art.results_csv);
    write_text(dir / "summary.json", art.summary.dump(2) + "\n");
    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["master_seed"] = seed_used;
    manifest["wall_time_s"] = wall_seconds;
    manifest["config"] = cfg;
    manifest["outputs"] = json{
        {"results.csv", file_digest(dir / "results.csv")},
        {"summary.json", file_digest(dir / "summary.json")},
    };
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return RunResult{dir, art.summary};
}

}  // namespace

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    // manifests re-run through their embedded config
    if (cfg.is_object() && cfg.contains("config") && cfg.contains("tool_version"))
        return cfg["config"];
    return cfg;
}

RunResult run_experiment(const json& cfg, const RunOptions& options) {
    validate_config(cfg);
    fs::path dir = prepare_run_dir(cfg, options);
    auto t0 = std::chrono::steady_clock::now();
    Artifacts art = dispatch(cfg, options);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    uint64_t seed_used = options.seed ? *options.seed
        : (cfg.contains("seed") ? cfg["seed"].get<uint64_t>() : 0);
    return finalize(cfg, art, dir, wall, seed_used);
}

namespace {

// Applies a sweep value to a copy of the config.
json apply_param(const json& cfg, const std::string& param, double value) {
    json out = cfg;
    std::string exp = cfg["experiment"].get<std::string>();
    if (param == "theta" && (exp == "bb84" || exp == "bbm92" || exp == "qcl")) {
        if (exp == "qcl") out["initial_theta"] = value;
        else {
            if (!out.contains("attack")) out["attack"] = json{{"type", "pccm"}};
            out["attack"]["theta"] = value;
        }
        return out;
    }
    if (param == "psi" && (exp == "bb84" || exp == "bbm92")) {
        if (!out.contains("attack") || out["attack"]["type"] != "imbalanced")
            throw ConfigError("psi sweep needs an imbalanced attack in the config");
        out["attack"]["psi"] = value;
        if (out["attack"].contains("tuned_p")) {
            out["attack"]["phi"] = optimal_phi(value, out["attack"]["tuned_p"].get<double>());
            out["attack"].erase("tuned_p");
        }
        return out;
    }
    if (param == "p_d") { out["p_d"] = value; return out; }
    if (param == "m" && exp == "qec422") { out["m"] = static_cast<int>(value); out.erase("m_grid"); return out; }
    if (param == "rounds_max" && exp == "steane-monitor") {
        out["rounds_max"] = static_cast<int>(value);
        return out;
    }
    if (param == "duration" && exp == "sidechannel") {
        out["durations"] = json::array({value});
        return out;
    }
    throw ConfigError("parameter '" + param + "' is not sweepable for " + exp);
}

// Headline columns pulled from each point's summary for the merged CSV.
std::pair<std::string, std::string> merged_row(const json& summary) {
    std::string exp = summary["experiment"].get<std::string>();
    if (exp == "bb84" || exp == "bbm92") {
        std::string header = "C_AB,C_AE,C_BE,std_err";
        std::ostringstream row;
        double cab = summary.contains("C_AB") ? summary["C_AB"]["value"].get<double>() : 0.0;
        double cae = summary.contains("C_AE") ? summary["C_AE"]["value"].get<double>() : 0.0;
        double cbe = summary.contains("C_BE") ? summary["C_BE"]["value"].get<double>() : 0.0;
        double se = summary.contains("C_AB") ? summary["C_AB"]["std_err"].get<double>() : 0.0;
        row << fmt(cab) << ',' << fmt(cae) << ',' << fmt(cbe) << ',' << fmt(se);
        return {header, row.str()};
    }
    if (exp == "qec422") {
        const json& pt = summary["points"][0];
        std::ostringstream row;
        row << fmt(pt["acceptance"].get<double>()) << ','
            << fmt(pt["flip_lq1"].get<double>()) << ',' << fmt(pt["flip_lq2"].get<double>());
        return {"acceptance,flip_lq1,flip_lq2", row.str()};
    }
    if (exp == "steane-monitor") {
        std::ostringstream row;
        row << fmt(summary["acceptance"].get<double>()) << ','
            << fmt(summary["flip_rate"].get<double>());
        return {"acceptance,flip_rate", row.str()};
    }
    if (exp == "sidechannel") {
        const json& pt = summary["points"][0];
        std::ostringstream row;
        row << fmt(pt["p_dark_input0"].get<double>()) << ','
            << fmt(pt["p_dark_input1"].get<double>());
        return {"p_dark_input0,p_dark_input1", row.str()};
    }
    if (exp == "qcl") {
        std::ostringstream row;
        row << fmt(summary["theta_star"].get<double>()) << ','
            << fmt(summary["f_ab_exact"].get<double>());
        return {"theta_star,f_ab_exact", row.str()};
    }
    return {"", ""};
}

}  // namespace

RunResult sweep_experiment(const json& cfg, const std::string& param,
                           const std::vector<double>& grid, const RunOptions& options) {
    validate_config(cfg);
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    std::string exp = cfg["experiment"].get<std::string>();
    std::string label = options.label ? *options.label
        : (cfg.contains("label") ? cfg["label"].get<std::string>() : std::string("sweep"));
    fs::path dir = fs::path(options.out_dir) / exp / label;
    if (fs::exists(dir)) {
        if (!options.force)
            throw ConfigError("output path exists (use --force): " + dir.string());
        fs::remove_all(dir);
    }
    fs::create_directories(dir);

    std::ostringstream merged;
    std::string header;
    json point_summaries = json::array();
    for (size_t i = 0; i < grid.size(); ++i) {
        json point_cfg = apply_param(cfg, param, grid[i]);
        RunOptions point_opts = options;
        point_opts.out_dir = dir.string();
        point_opts.label = "g" + std::to_string(i);
        point_opts.force = true;
        // sub-runs live under <sweep dir>/<experiment>/gN
        RunResult point = run_experiment(point_cfg, point_opts);
        auto [cols, row] = merged_row(point.summary);
        if (i == 0) {
            header = param + "," + cols;
            merged << header << '\n';
        }
        merged << fmt(grid[i]) << ',' << row << '\n';
        point_summaries.push_back(point.summary);
    }
    write_text(dir / "merged.csv", merged.str());
    json summary;
    summary["experiment"] = exp;
    summary["sweep_param"] = param;
    summary["grid"] = grid;
    summary["points"] = point_summaries;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config"] = cfg;
    manifest["sweep"] = json{{"param", param}, {"grid", grid}};
    manifest["outputs"] = json{{"merged.csv", file_digest(dir / "merged.csv")}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return RunResult{dir, summary};
}

}  // namespace qkdsim
