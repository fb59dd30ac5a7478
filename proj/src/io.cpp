#include "sacsp/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace sacsp {

namespace {

using nlohmann::json;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

json vec_to_json(const RealVector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

RealVector vec_from_json(const json& a) {
    RealVector v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<double>();
    return v;
}

json mat_to_json(const RealMatrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

RealMatrix mat_from_json(const json& rows) {
    const Index nr = static_cast<Index>(rows.size());
    const Index nc = nr > 0 ? static_cast<Index>(rows[0].size()) : 0;
    RealMatrix m(nr, nc);
    for (Index r = 0; r < nr; ++r)
        for (Index c = 0; c < nc; ++c)
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    return m;
}

}  // namespace

void write_epoch_file(const std::string& path, const EpochSet& set) {
    if (set.epochs.empty()) throw_io("write_epoch_file: empty epoch set");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw_io("write_epoch_file: cannot open '" + path + "'");

    const Index n = set.n_channels;
    const Index t = set.n_samples();
    os.write("EPD1", 4);
    put_u32(os, static_cast<std::uint32_t>(n));
    put_u32(os, static_cast<std::uint32_t>(t));
    put_u32(os, static_cast<std::uint32_t>(set.epochs.size()));
    put_u32(os, static_cast<std::uint32_t>(std::llround(set.fs)));

    for (const Epoch& e : set.epochs) {
        if (e.label != 1 && e.label != 2)
            throw_io("write_epoch_file: labels must be 1 or 2");
        const unsigned char l = static_cast<unsigned char>(e.label);
        os.write(reinterpret_cast<const char*>(&l), 1);
    }
    for (const Epoch& e : set.epochs) {
        if (e.data.rows() != n || e.data.cols() != t)
            throw_io("write_epoch_file: inconsistent epoch shapes");
        for (Index r = 0; r < n; ++r) {
            // row-major within the epoch; doubles are written verbatim
            for (Index c = 0; c < t; ++c) {
                const double v = e.data(r, c);
                os.write(reinterpret_cast<const char*>(&v), sizeof(double));
            }
        }
    }
    if (!os) throw_io("write_epoch_file: write failed on '" + path + "'");
}

EpochSet read_epoch_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw_io("read_epoch_file: cannot open '" + path + "'");

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "EPD1", 4) != 0)
        throw_io("read_epoch_file: '" + path + "' is not an EPD1 file");

    const std::uint32_t n = get_u32(is);
    const std::uint32_t t = get_u32(is);
    const std::uint32_t n_epochs = get_u32(is);
    const std::uint32_t fs = get_u32(is);
    if (!is || n == 0 || t == 0 || n_epochs == 0 || fs == 0)
        throw_io("read_epoch_file: malformed header in '" + path + "'");

    std::vector<unsigned char> labels(n_epochs);
    is.read(reinterpret_cast<char*>(labels.data()), n_epochs);
    for (unsigned char l : labels)
        if (l != 1 && l != 2) throw_io("read_epoch_file: label out of range in '" + path + "'");

    EpochSet set;
    set.fs = static_cast<double>(fs);
    set.n_channels = static_cast<Index>(n);
    set.epochs.resize(n_epochs);
    for (std::uint32_t i = 0; i < n_epochs; ++i) {
        Epoch& e = set.epochs[i];
        e.label = labels[i];
        e.fs = set.fs;
        e.data.resize(n, t);
        for (std::uint32_t r = 0; r < n; ++r)
            for (std::uint32_t c = 0; c < t; ++c) {
                double v;
                is.read(reinterpret_cast<char*>(&v), sizeof(double));
                e.data(r, c) = v;
            }
    }
    if (!is) throw_io("read_epoch_file: payload truncated in '" + path + "'");
    return set;
}

namespace {

json config_to_json(const SacspConfig& c) {
    json kinds = json::array();
    for (InitKind k : c.init_kinds) kinds.push_back(to_string(k));
    return {{"r_filters", c.r_filters},
            {"m_inits", c.m_inits},
            {"epsilon", c.epsilon},
            {"max_iters", c.max_iters},
            {"init_kinds", kinds},
            {"whiten_threshold", c.whiten_threshold},
            {"disable_spectral_updates", c.disable_spectral_updates}};
}

SacspConfig config_from_json(const json& j) {
    SacspConfig c;
    c.r_filters = j.at("r_filters").get<int>();
    c.m_inits = j.at("m_inits").get<int>();
    c.epsilon = j.at("epsilon").get<double>();
    c.max_iters = j.at("max_iters").get<int>();
    c.init_kinds.clear();
    for (const auto& k : j.at("init_kinds"))
        c.init_kinds.push_back(init_kind_from_string(k.get<std::string>()));
    c.whiten_threshold = j.at("whiten_threshold").get<double>();
    c.disable_spectral_updates = j.value("disable_spectral_updates", false);
    return c;
}

}  // namespace

void save_model(const std::string& path, const SacspModel& model) {
    json doc;
    doc["format"] = "sacsp-model";
    doc["version"] = 1;
    doc["algo"] = model.bank.algo_tag;
    doc["config"] = config_to_json(model.config);
    doc["fingerprint"] = {{"fs", model.fingerprint.fs},
                          {"band_low_hz", model.fingerprint.low_hz},
                          {"band_high_hz", model.fingerprint.high_hz},
                          {"t", model.fingerprint.t}};

    json pairs = json::array();
    for (const FilterPair& p : model.bank.pairs) {
        pairs.push_back({{"class", p.class_id},
                         {"objective", p.objective},
                         {"spatial", vec_to_json(p.spatial)},
                         {"spectral", vec_to_json(p.spectral.weights)}});
    }
    doc["pairs"] = std::move(pairs);
    doc["patterns"] = mat_to_json(model.bank.patterns);
    doc["projector"] = {{"q", mat_to_json(model.bank.projector.q)},
                        {"rank", model.bank.projector.rank},
                        {"retained_eigenvalues",
                         vec_to_json(model.bank.projector.retained_eigenvalues)}};
    doc["lda"] = {{"weights", vec_to_json(model.lda.weights)},
                  {"bias", model.lda.bias},
                  {"shrinkage", model.lda.shrinkage_used},
                  {"class_means", mat_to_json(model.lda.class_means)}};

    std::ofstream os(path);
    if (!os) throw_io("save_model: cannot open '" + path + "'");
    os << doc.dump(2) << "\n";
    if (!os) throw_io("save_model: write failed on '" + path + "'");
}

SacspModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw_io("load_model: cannot open '" + path + "'");
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        throw_io("load_model: '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "sacsp-model")
            throw_io("load_model: '" + path + "' is not a sacsp model file");

        SacspModel m;
        m.bank.algo_tag = doc.at("algo").get<std::string>();
        m.config = config_from_json(doc.at("config"));
        const json& fp = doc.at("fingerprint");
        m.fingerprint = {fp.at("fs").get<double>(), fp.at("band_low_hz").get<double>(),
                         fp.at("band_high_hz").get<double>(),
                         fp.at("t").get<Index>()};
        m.bank.t = m.fingerprint.t;
        m.bank.fs = m.fingerprint.fs;

        for (const json& jp : doc.at("pairs")) {
            FilterPair p;
            p.class_id = jp.at("class").get<int>();
            p.objective = jp.at("objective").get<double>();
            p.spatial = vec_from_json(jp.at("spatial"));
            p.spectral.weights = vec_from_json(jp.at("spectral"));
            p.spectral.fs = m.fingerprint.fs;
            m.bank.pairs.push_back(std::move(p));
        }
        m.bank.patterns = mat_from_json(doc.at("patterns"));
        const json& pr = doc.at("projector");
        m.bank.projector.q = mat_from_json(pr.at("q"));
        m.bank.projector.rank = pr.at("rank").get<Index>();
        m.bank.projector.retained_eigenvalues =
            vec_from_json(pr.at("retained_eigenvalues"));
        const json& lda = doc.at("lda");
        m.lda.weights = vec_from_json(lda.at("weights"));
        m.lda.bias = lda.at("bias").get<double>();
        m.lda.shrinkage_used = lda.at("shrinkage").get<double>();
        m.lda.class_means = mat_from_json(lda.at("class_means"));
        return m;
    } catch (const json::exception& e) {
        throw_io("load_model: '" + path + "' is missing fields: " + e.what());
    }
}

void write_report_json(const std::string& path, const EvalReport& report,
                       std::uint64_t seed) {
    json doc;
    doc["algo"] = report.algo_tag;
    doc["protocol"] = report.protocol_tag;
    doc["seed"] = seed;
    doc["repeats"] = report.per_repeat_accuracy.size();
    doc["per_repeat_accuracy"] = report.per_repeat_accuracy;
    doc["mean"] = report.mean;
    doc["dispersion"] = report.dispersion;
    std::ofstream os(path);
    if (!os) throw_io("write_report_json: cannot open '" + path + "'");
    os << doc.dump(2) << "\n";
}

void write_report_csv(const std::string& path, const EvalReport& report) {
    std::ofstream os(path);
    if (!os) throw_io("write_report_csv: cannot open '" + path + "'");
    os << "repeat,algo,protocol,accuracy\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < report.per_repeat_accuracy.size(); ++i)
        os << i << "," << report.algo_tag << "," << report.protocol_tag << ","
           << report.per_repeat_accuracy[i] << "\n";
}

namespace {

std::string pair_name(const FilterPair& p, std::size_t index_in_class) {
    return "class" + std::to_string(p.class_id) + "_f" +
           std::to_string(index_in_class + 1);
}

void write_spectral_csv(const SacspModel& model, const std::string& path) {
    const Index t = model.fingerprint.t;
    const double fs = model.fingerprint.fs;
    std::ofstream os(path);
    if (!os) throw_io("export: cannot open '" + path + "'");
    os << std::setprecision(17);

    os << "frequency_hz";
    std::size_t idx1 = 0, idx2 = 0;
    for (const FilterPair& p : model.bank.pairs)
        os << "," << pair_name(p, p.class_id == 1 ? idx1++ : idx2++);
    os << "\n";

    for (Index k = 0; k <= t / 2; ++k) {
        os << (static_cast<double>(k) * fs / static_cast<double>(t));
        for (const FilterPair& p : model.bank.pairs) {
            const double norm = p.spectral.weights.norm();
            os << "," << (norm > 0.0 ? p.spectral.weights(k) / norm : 0.0);
        }
        os << "\n";
    }
}

void write_patterns_csv(const SacspModel& model, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw_io("export: cannot open '" + path + "'");
    os << std::setprecision(17);

    os << "channel_index";
    std::size_t idx1 = 0, idx2 = 0;
    for (const FilterPair& p : model.bank.pairs)
        os << "," << pair_name(p, p.class_id == 1 ? idx1++ : idx2++);
    os << "\n";
    for (Index c = 0; c < model.bank.patterns.rows(); ++c) {
        os << c;
        for (Index j = 0; j < model.bank.patterns.cols(); ++j)
            os << "," << model.bank.patterns(c, j);
        os << "\n";
    }
}

void write_spectral_svg(const SacspModel& model, const std::string& path) {
    const Index t = model.fingerprint.t;
    const double fs = model.fingerprint.fs;
    const double fmax = fs / 2.0;

    const int width = 720, height = 420;
    const int ml = 60, mr = 20, mt = 20, mb = 45;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double ymax = 1e-12;
    std::vector<RealVector> lines;
    for (const FilterPair& p : model.bank.pairs) {
        const double norm = p.spectral.weights.norm();
        RealVector w = norm > 0.0 ? RealVector(p.spectral.weights / norm)
                                  : RealVector(p.spectral.weights);
        for (Index k = 0; k <= t / 2; ++k) ymax = std::max(ymax, std::abs(w(k)));
        lines.push_back(std::move(w));
    }

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    for (int f = 0; f <= static_cast<int>(fmax); f += 10) {
        const double x = ml + pw * f / fmax;
        svg << "<line x1=\"" << x << "\" y1=\"" << mt + ph << "\" x2=\"" << x
            << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << mt + ph + 20
            << "\" font-size=\"11\" text-anchor=\"middle\">" << f << "</text>\n";
    }
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
        << "\" font-size=\"12\" text-anchor=\"middle\">frequency (Hz)</text>\n";
    svg << "<text x=\"15\" y=\"" << mt + ph / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
        << mt + ph / 2 << ")\">normalized weight</text>\n";

    std::size_t idx1 = 0, idx2 = 0;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const RealVector& w = lines[li];
        svg << "<polyline fill=\"none\" stroke=\"" << palette[li % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (Index k = 0; k <= t / 2; ++k) {
            const double f = static_cast<double>(k) * fs / static_cast<double>(t);
            const double x = ml + pw * f / fmax;
            const double y = mt + ph - ph * std::max(0.0, w(k)) / ymax;
            svg << x << "," << y << " ";
        }
        svg << "\"/>\n";
        const FilterPair& p = model.bank.pairs[li];
        const std::string name = pair_name(p, p.class_id == 1 ? idx1++ : idx2++);
        svg << "<text x=\"" << ml + pw - 80 << "\" y=\"" << mt + 16 + 15 * li
            << "\" font-size=\"11\" fill=\"" << palette[li % 8] << "\">" << name
            << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream os(path);
    if (!os) throw_io("export: cannot open '" + path + "'");
    os << svg.str();
    if (!os) throw_io("export: write failed on '" + path + "'");
}

}  // namespace

void export_model(const SacspModel& model, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw_io("export: cannot create directory '" + out_dir + "'");
    const std::filesystem::path dir(out_dir);
    write_spectral_csv(model, (dir / "spectral_filters.csv").string());
    write_patterns_csv(model, (dir / "spatial_patterns.csv").string());
    write_spectral_svg(model, (dir / "spectral_filters.svg").string());
}

}  // namespace sacsp
