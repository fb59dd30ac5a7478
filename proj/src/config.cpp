#include "sacsp/config.hpp"

#include <fstream>

#include <json.hpp>

namespace sacsp {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw_config("config: " + path + ": " + why);
}

double get_num(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) bad_field(path + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& j, const std::string& path, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) bad_field(path + "." + key, "expected an integer");
    return v.get<int>();
}

SynthSpec parse_synth(const json& j, const std::string& path, const SynthSpec& base) {
    SynthSpec spec = base;
    spec.n_channels = get_int(j, path, "n_channels", static_cast<int>(base.n_channels));
    spec.fs = get_num(j, path, "fs", base.fs);
    spec.epoch_seconds = get_num(j, path, "epoch_seconds", base.epoch_seconds);
    spec.n_epochs_per_class =
        get_int(j, path, "n_epochs_per_class", static_cast<int>(base.n_epochs_per_class));
    spec.noise_sigma = get_num(j, path, "noise_sigma", base.noise_sigma);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) bad_field(path + ".seed", "expected an integer");
        spec.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("sources")) {
        const json& srcs = j.at("sources");
        if (!srcs.is_array() || srcs.empty())
            bad_field(path + ".sources", "expected a non-empty array");
        spec.sources.clear();
        for (std::size_t i = 0; i < srcs.size(); ++i) {
            const std::string sp = path + ".sources[" + std::to_string(i) + "]";
            const json& js = srcs[i];
            if (!js.is_object()) bad_field(sp, "expected an object");
            SynthSource src;
            if (!js.contains("mixing") || !js.at("mixing").is_array())
                bad_field(sp + ".mixing", "expected an array of channel weights");
            const json& mix = js.at("mixing");
            src.mixing.resize(static_cast<Index>(mix.size()));
            for (std::size_t m = 0; m < mix.size(); ++m) {
                if (!mix[m].is_number()) bad_field(sp + ".mixing", "expected numbers");
                src.mixing(static_cast<Index>(m)) = mix[m].get<double>();
            }
            src.center_hz = get_num(js, sp, "center_hz", 0.0);
            src.bandwidth_hz = get_num(js, sp, "bandwidth_hz", 0.0);
            src.class1_amp = get_num(js, sp, "class1_amp", 0.0);
            src.class2_amp = get_num(js, sp, "class2_amp", 0.0);
            if (src.mixing.size() != spec.n_channels)
                bad_field(sp + ".mixing", "length must equal n_channels");
            if (src.mixing.norm() == 0.0) bad_field(sp + ".mixing", "must be nonzero");
            src.mixing.normalize();
            const double lo = src.center_hz - src.bandwidth_hz / 2.0;
            const double hi = src.center_hz + src.bandwidth_hz / 2.0;
            if (!(src.bandwidth_hz > 0.0) || !(lo > 0.0) || !(hi < spec.fs / 2.0))
                bad_field(sp + ".center_hz",
                          "band must satisfy 0 < center +- bandwidth/2 < fs/2");
            if (src.class1_amp < 0.0) bad_field(sp + ".class1_amp", "must be >= 0");
            if (src.class2_amp < 0.0) bad_field(sp + ".class2_amp", "must be >= 0");
            spec.sources.push_back(std::move(src));
        }
    } else {
        // rescale inherited mixing columns if the channel count changed
        for (std::size_t i = 0; i < spec.sources.size(); ++i)
            if (spec.sources[i].mixing.size() != spec.n_channels)
                bad_field(path + ".sources[" + std::to_string(i) + "].mixing",
                          "length must equal n_channels (set sources explicitly)");
    }
    return spec;
}

}  // namespace

CliConfig default_cli_config() {
    CliConfig c;
    c.synth = default_synth_spec(101);
    SynthSpec online = c.synth;
    online.n_epochs_per_class = 2 * c.synth.n_epochs_per_class;
    online.seed = derive_seed(c.synth.seed, 0x0e11);
    c.synth_online = online;
    return c;
}

CliConfig load_cli_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw_io("config: cannot open '" + path + "'");
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        throw_config("config: '" + path + "' is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw_config("config: top level must be a JSON object");

    CliConfig c = default_cli_config();

    if (doc.contains("preprocess")) {
        const json& p = doc.at("preprocess");
        if (!p.is_object()) bad_field("preprocess", "expected an object");
        c.preprocess.target_fs = get_num(p, "preprocess", "target_fs", c.preprocess.target_fs);
        c.preprocess.band_low_hz = get_num(p, "preprocess", "band_low_hz", c.preprocess.band_low_hz);
        c.preprocess.band_high_hz =
            get_num(p, "preprocess", "band_high_hz", c.preprocess.band_high_hz);
        c.preprocess.filter_order =
            get_int(p, "preprocess", "filter_order", c.preprocess.filter_order);
        c.preprocess.window_seconds =
            get_num(p, "preprocess", "window_seconds", c.preprocess.window_seconds);
        if (!(c.preprocess.band_low_hz > 0.0) ||
            !(c.preprocess.band_low_hz < c.preprocess.band_high_hz))
            bad_field("preprocess.band_low_hz", "need 0 < low < high");
    }

    if (doc.contains("sacsp")) {
        const json& s = doc.at("sacsp");
        if (!s.is_object()) bad_field("sacsp", "expected an object");
        c.sacsp.r_filters = get_int(s, "sacsp", "r_filters", c.sacsp.r_filters);
        c.sacsp.m_inits = get_int(s, "sacsp", "m_inits", c.sacsp.m_inits);
        c.sacsp.epsilon = get_num(s, "sacsp", "epsilon", c.sacsp.epsilon);
        c.sacsp.max_iters = get_int(s, "sacsp", "max_iters", c.sacsp.max_iters);
        c.sacsp.whiten_threshold =
            get_num(s, "sacsp", "whiten_threshold", c.sacsp.whiten_threshold);
        if (s.contains("init_kinds")) {
            const json& kinds = s.at("init_kinds");
            if (!kinds.is_array() || kinds.empty())
                bad_field("sacsp.init_kinds", "expected a non-empty array");
            c.sacsp.init_kinds.clear();
            for (const auto& k : kinds) {
                if (!k.is_string()) bad_field("sacsp.init_kinds", "expected strings");
                try {
                    c.sacsp.init_kinds.push_back(init_kind_from_string(k.get<std::string>()));
                } catch (const Error&) {
                    bad_field("sacsp.init_kinds",
                              "unknown kind '" + k.get<std::string>() + "'");
                }
            }
            c.sacsp.m_inits = static_cast<int>(c.sacsp.init_kinds.size());
        }
        if (s.contains("disable_spectral_updates"))
            c.sacsp.disable_spectral_updates = s.at("disable_spectral_updates").get<bool>();
        try {
            c.sacsp.validate();
        } catch (const Error& e) {
            throw_config(std::string("config: sacsp: ") + e.what());
        }
    }

    if (doc.contains("synth")) {
        const json& s = doc.at("synth");
        if (!s.is_object()) bad_field("synth", "expected an object");
        c.synth = parse_synth(s, "synth", c.synth);
        if (s.contains("online")) {
            const json& o = s.at("online");
            if (!o.is_object()) bad_field("synth.online", "expected an object");
            SynthSpec base = c.synth;
            base.n_epochs_per_class = 2 * c.synth.n_epochs_per_class;
            base.seed = derive_seed(c.synth.seed, 0x0e11);
            c.synth_online = parse_synth(o, "synth.online", base);
        } else {
            SynthSpec online = c.synth;
            online.n_epochs_per_class = 2 * c.synth.n_epochs_per_class;
            online.seed = derive_seed(c.synth.seed, 0x0e11);
            c.synth_online = online;
        }
    }

    if (doc.contains("eval")) {
        const json& e = doc.at("eval");
        if (!e.is_object()) bad_field("eval", "expected an object");
        if (e.contains("protocol")) {
            const std::string p = e.at("protocol").get<std::string>();
            if (p == "transfer") c.eval.protocol = Protocol::Transfer;
            else if (p == "kfold") c.eval.protocol = Protocol::Kfold;
            else bad_field("eval.protocol", "expected transfer|kfold");
        }
        c.eval.repeats = get_int(e, "eval", "repeats", c.eval.repeats);
        c.eval.k = get_int(e, "eval", "k", c.eval.k);
        if (e.contains("seed")) c.eval.seed = e.at("seed").get<std::uint64_t>();
        if (c.eval.repeats < 1) bad_field("eval.repeats", "must be >= 1");
        if (c.eval.k < 2) bad_field("eval.k", "must be >= 2");
    }

    return c;
}

SynthSpec online_spec(const CliConfig& config) {
    if (config.synth_online) return *config.synth_online;
    SynthSpec online = config.synth;
    online.n_epochs_per_class = 2 * config.synth.n_epochs_per_class;
    online.seed = derive_seed(config.synth.seed, 0x0e11);
    return online;
}

}  // namespace sacsp
