#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "sacsp/config.hpp"
#include "sacsp/io.hpp"
#include "sacsp/parallel.hpp"
#include "sacsp/preprocess.hpp"

namespace fs = std::filesystem;
using namespace sacsp;

namespace {

int exit_code_for(const Error& e, const std::string& command) {
    switch (e.kind()) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Io: return 5;
        default: break;
    }
    if (command == "train") return 3;
    if (command == "eval") return 4;
    if (command == "export") return 5;
    return 2;
}

CliConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return default_cli_config();
    return load_cli_config(path);
}

int cmd_synth(const std::string& config_path, std::string out_dir,
              std::uint64_t seed, bool seed_given) {
    CliConfig config = load_config_or_default(config_path);
    if (seed_given) config.synth.seed = seed;
    SynthSpec online = online_spec(config);
    if (seed_given) online.seed = derive_seed(seed, 0x0e11);

    if (out_dir.empty()) out_dir = ".";
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw_io("synth: cannot create output directory '" + out_dir + "'");

    // mirror the recorded-data pipeline: written epochs are bandpassed, as
    // the trainers expect
    const EpochSet calib = bandpass_epochs(generate(config.synth),
                                           config.preprocess.band_low_hz,
                                           config.preprocess.band_high_hz,
                                           config.preprocess.filter_order);
    const EpochSet onl = bandpass_epochs(generate(online),
                                         config.preprocess.band_low_hz,
                                         config.preprocess.band_high_hz,
                                         config.preprocess.filter_order);
    const std::string calib_path = (fs::path(out_dir) / "calib.epd").string();
    const std::string online_path = (fs::path(out_dir) / "online.epd").string();
    write_epoch_file(calib_path, calib);
    write_epoch_file(online_path, onl);

    std::printf("wrote %s (%zu epochs) and %s (%zu epochs)\n", calib_path.c_str(),
                calib.epochs.size(), online_path.c_str(), onl.epochs.size());
    std::printf("planted sources (calibration):\n");
    for (std::size_t i = 0; i < config.synth.sources.size(); ++i) {
        const SynthSource& s = config.synth.sources[i];
        std::printf("  source %zu: %.1f Hz +- %.1f Hz, amplitudes %.2f / %.2f\n", i,
                    s.center_hz, s.bandwidth_hz / 2.0, s.class1_amp, s.class2_amp);
    }
    return 0;
}

int cmd_train(const std::string& epochs_path, const std::string& algo_name,
              const std::string& config_path, const std::string& out_path) {
    CliConfig config = load_config_or_default(config_path);
    const Algo algo = algo_from_string(algo_name);
    const EpochSet set = read_epoch_file(epochs_path);

    const SacspModel model = train_model(set, algo, config.sacsp,
                                         config.preprocess.band_low_hz,
                                         config.preprocess.band_high_hz);
    save_model(out_path, model);

    std::printf("trained %s on %zu epochs (%lld channels, t=%lld)\n",
                model.bank.algo_tag.c_str(), set.epochs.size(),
                static_cast<long long>(set.n_channels),
                static_cast<long long>(model.bank.t));
    std::printf("%-7s %-5s %-5s %-6s %s\n", "class", "init", "eig", "iters", "objective");
    for (const OptTrace& tr : model.bank.trace) {
        std::printf("%-7d %-5d %-5d %-6d %.8f%s%s\n", tr.class_id, tr.init_index,
                    tr.eigvec_index, tr.iterations(), tr.objectives.back(),
                    tr.selected ? "  [selected]" : "",
                    tr.hit_max_iters ? "  [max iters]" : "");
    }
    std::printf("model written to %s\n", out_path.c_str());
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& algo_name,
             const std::string& config_path, const std::string& calib_path,
             const std::string& online_path, const std::string& protocol_name,
             int repeats, std::uint64_t seed, bool seed_given,
             const std::string& out_prefix) {
    CliConfig config = load_config_or_default(config_path);
    if (!protocol_name.empty()) {
        if (protocol_name == "transfer") config.eval.protocol = Protocol::Transfer;
        else if (protocol_name == "kfold") config.eval.protocol = Protocol::Kfold;
        else throw_config("eval: unknown protocol '" + protocol_name + "'");
    }
    if (repeats > 0) config.eval.repeats = repeats;
    if (seed_given) config.eval.seed = seed;

    SplitPlan plan;
    plan.protocol = config.eval.protocol;
    plan.k = config.eval.k;
    plan.n_repeats = config.eval.repeats;
    plan.seed = config.eval.seed;

    const EpochSet calib = read_epoch_file(calib_path);

    EvalReport report;
    if (!model_path.empty()) {
        const SacspModel model = load_model(model_path);
        const EpochSet online = read_epoch_file(online_path.empty() ? calib_path : online_path);
        report = run_transfer_fixed(model, online, plan);
    } else if (plan.protocol == Protocol::Transfer) {
        if (online_path.empty())
            throw_config("eval: transfer protocol needs --online");
        const EpochSet online = read_epoch_file(online_path);
        report = run_transfer(calib, online, algo_from_string(algo_name), config.sacsp, plan);
    } else {
        report = run_kfold(calib, algo_from_string(algo_name), config.sacsp, plan);
    }

    const std::string prefix = out_prefix.empty() ? "report" : out_prefix;
    write_report_json(prefix + ".json", report, plan.seed);
    write_report_csv(prefix + ".csv", report);

    std::printf("%s %s accuracy: %.2f/%.3f  (%d repeats)\n", report.algo_tag.c_str(),
                report.protocol_tag.c_str(), report.mean, report.dispersion,
                plan.n_repeats);
    std::printf("reports written to %s.json and %s.csv\n", prefix.c_str(), prefix.c_str());
    return 0;
}

int cmd_export(const std::string& model_path, const std::string& out_dir) {
    const SacspModel model = load_model(model_path);
    export_model(model, out_dir);
    std::printf("exported spectral_filters.csv, spatial_patterns.csv, "
                "spectral_filters.svg to %s\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    parallel::configure_from_env();

    CLI::App app{"sacsp: joint spatial/spectral filter learning for two-class "
                 "multichannel time series"};
    app.require_subcommand(1);

    std::string config_path, out, epochs_path, algo = "sacsp", model_path;
    std::string calib_path, online_path, protocol;
    std::uint64_t seed = 0;
    int repeats = 0;

    auto* synth = app.add_subcommand("synth", "generate a synthetic calibration/online pair");
    synth->add_option("--config", config_path, "JSON config file");
    synth->add_option("--out", out, "output directory");
    auto* synth_seed = synth->add_option("--seed", seed, "generator seed override");

    auto* train = app.add_subcommand("train", "train a model on an epoch file");
    train->add_option("--epochs", epochs_path, "input .epd epoch file")->required();
    train->add_option("--algo", algo, "csp|ccacsp|sacsp");
    train->add_option("--config", config_path, "JSON config file");
    train->add_option("--out", out, "output model path")->required();

    auto* eval = app.add_subcommand("eval", "evaluate an algorithm or a saved model");
    eval->add_option("--model", model_path, "saved model (fixed-model evaluation)");
    eval->add_option("--algo", algo, "csp|ccacsp|sacsp");
    eval->add_option("--config", config_path, "JSON config file");
    eval->add_option("--calib", calib_path, "calibration .epd file")->required();
    eval->add_option("--online", online_path, "online .epd file");
    eval->add_option("--protocol", protocol, "transfer|kfold");
    eval->add_option("--repeats", repeats, "number of repeats");
    auto* eval_seed = eval->add_option("--seed", seed, "evaluation seed");
    eval->add_option("--out", out, "report path prefix");

    auto* exp = app.add_subcommand("export", "export filters and patterns as CSV/SVG");
    exp->add_option("--model", model_path, "saved model")->required();
    exp->add_option("--out", out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "synth")
            return cmd_synth(config_path, out, seed, synth_seed->count() > 0);
        if (command == "train")
            return cmd_train(epochs_path, algo, config_path, out);
        if (command == "eval")
            return cmd_eval(model_path, algo, config_path, calib_path, online_path,
                            protocol, repeats, seed, eval_seed->count() > 0, out);
        if (command == "export") return cmd_export(model_path, out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e, command);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
