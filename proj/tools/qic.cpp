// qic: encode images into coefficient circuits, decode them back, check
// circuit equivalence block by block and run the benchmark sweep.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qic/qic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw qic::Error(qic::ErrorCode::FileNotFound, p.string());
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const fs::path &p, const std::string &text) {
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) {
        throw qic::Error(qic::ErrorCode::IoFailure, "cannot write " + p.string());
    }
}

// Appends one CSV row, writing the header first when the file is new or empty.
void append_csv(const fs::path &p, std::string_view header, const std::string &row) {
    const bool fresh = !fs::exists(p) || fs::file_size(p) == 0;
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary | std::ios::app);
    if (fresh) {
        out << header << '\n';
    }
    out << row << '\n';
    if (!out) {
        throw qic::Error(qic::ErrorCode::IoFailure, "cannot append to " + p.string());
    }
}

std::pair<std::size_t, std::size_t> parse_pair(const std::string &s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        throw UsageError("expected 'a,b', got '" + s + "'");
    }
    try {
        return {std::stoul(s.substr(0, comma)), std::stoul(s.substr(comma + 1))};
    } catch (const std::exception &) {
        throw UsageError("expected 'a,b', got '" + s + "'");
    }
}

qic::Scheme scheme_or_usage(const std::string &s) {
    const auto k = qic::parse_scheme(s);
    if (!k) {
        throw UsageError("unknown scheme '" + s + "'");
    }
    return *k;
}

qic::SweepConfig config_or_default(const std::string &path) {
    return path.empty() ? qic::SweepConfig{} : qic::load_config(path);
}

// ---------------------------------------------------------------------------

struct EncodeArgs {
    std::string image;
    std::string config;
    int q = 8;
    std::string scheme = "mtgsc";
    std::string out = ".";
    std::string stats;
    bool level_shift = false;
    bool emit_recon = false;
    bool visual = false;
};

int cmd_encode(const EncodeArgs &a, const CLI::App &sub) {
    qic::SweepConfig cfg = config_or_default(a.config);
    int q = cfg.q_factors.front();
    qic::Scheme scheme = cfg.schemes.front();
    bool level_shift = cfg.level_shift;
    bool emit_recon = cfg.emit_recon;
    fs::path out = cfg.output_dir.empty() ? fs::path(".") : cfg.output_dir;
    if (sub.count("--q") > 0 || a.config.empty()) q = a.q;
    if (sub.count("--scheme") > 0 || a.config.empty()) scheme = scheme_or_usage(a.scheme);
    if (sub.count("--out") > 0) out = a.out;
    if (sub.count("--level-shift") > 0) level_shift = a.level_shift;
    if (sub.count("--emit-recon") > 0) emit_recon = a.emit_recon;
    if (q < 1) {
        throw UsageError("--q must be >= 1");
    }

    const qic::GrayImage img = qic::load_image(a.image);
    const qic::TransformOptions opts{level_shift};
    const qic::EncodeResult enc = qic::encode_image(img, q, scheme, opts);
    if (enc.clamped > 0) {
        std::cerr << "warning: " << enc.clamped << " coefficient magnitude(s) clamped to " << qic::kMaxMagnitude
                  << '\n';
    }
    const std::string name = fs::path(a.image).stem().string();
    const std::string stem = name + "_q" + std::to_string(q) + "_" + std::string(qic::to_string(scheme));
    write_text(out / (stem + ".json"), qic::serialize(enc.circuit));
    if (a.visual) {
        write_text(out / (stem + ".quirk.json"), qic::export_visual(enc.circuit) + "\n");
    }
    const std::string row = qic::stats_csv_row(enc.stats, scheme, name, q);
    append_csv(a.stats.empty() ? out / "stats.csv" : fs::path(a.stats), qic::kStatsCsvHeader, row);
    if (emit_recon) {
        qic::save_image(qic::decode_image(enc.circuit, img.width(), img.height(), q, opts), out / (stem + ".png"));
    }
    std::cout << qic::kStatsCsvHeader << '\n' << row << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct DecodeArgs {
    std::string circuit;
    std::string config;
    std::size_t width = 0;
    std::size_t height = 0;
    int q = 8;
    std::string scheme;
    std::string out = "recon.png";
    std::string original;
    std::string stats;
    bool level_shift = false;
};

constexpr std::string_view kQualityCsvHeader = "scheme,image,Q,mse,psnr";

int cmd_decode(const DecodeArgs &a, const CLI::App &sub) {
    qic::SweepConfig cfg = config_or_default(a.config);
    int q = cfg.q_factors.front();
    bool level_shift = cfg.level_shift;
    if (sub.count("--q") > 0 || a.config.empty()) q = a.q;
    if (sub.count("--level-shift") > 0) level_shift = a.level_shift;
    if (q < 1) {
        throw UsageError("--q must be >= 1");
    }

    const qic::Circuit c = qic::deserialize(read_text(a.circuit));
    const auto [ew, eh] = qic::metadata_extent(c);
    const std::size_t width = a.width > 0 ? a.width : ew;
    const std::size_t height = a.height > 0 ? a.height : eh;
    const qic::Scheme scheme = a.scheme.empty() ? qic::infer_scheme(c) : scheme_or_usage(a.scheme);
    const qic::GrayImage recon = qic::decode_image(c, width, height, q, qic::TransformOptions{level_shift});
    qic::save_image(recon, a.out);

    const std::string name = fs::path(a.original.empty() ? a.circuit : a.original).stem().string();
    std::string row = std::string(qic::to_string(scheme)) + "," + name + "," + std::to_string(q) + ",";
    if (!a.original.empty()) {
        const qic::QualityReport r = qic::psnr(qic::load_image(a.original), recon);
        row += qic::format_double(r.mse) + "," + qic::format_double(r.psnr);
    } else {
        row += ",";
    }
    if (!a.stats.empty()) {
        append_csv(a.stats, kQualityCsvHeader, row);
    }
    std::cout << kQualityCsvHeader << '\n' << row << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string circuit;
    bool demo = false;
    std::string demo_coeff = "62,3,2";
    std::vector<std::string> blocks;
    std::size_t max_blocks = 16;
    std::string out;
};

int cmd_verify(const VerifyArgs &a) {
    qic::Circuit c;
    if (a.demo) {
        std::vector<int> v;
        std::istringstream in(a.demo_coeff);
        for (std::string item; std::getline(in, item, ',');) {
            try {
                v.push_back(std::stoi(item));
            } catch (const std::exception &) {
                throw UsageError("--demo-coeff expects value,x,y");
            }
        }
        if (v.size() != 3 || v[0] == 0 || v[1] < 0 || v[1] > 7 || v[2] < 0 || v[2] > 7) {
            throw UsageError("--demo-coeff expects value,x,y with x,y in 0..7 and a non-zero value");
        }
        const std::vector<qic::SparseCoefficient> list{
            {0, 0, static_cast<unsigned>(v[1]), static_cast<unsigned>(v[2]), std::abs(v[0]), v[0] < 0 ? -1 : 1}};
        c = qic::build_mtgsc(list);
    } else {
        if (a.circuit.empty()) {
            throw UsageError("verify needs --circuit or --demo");
        }
        c = qic::deserialize(read_text(a.circuit));
    }
    qic::VerifyOptions opts;
    opts.max_blocks = a.max_blocks;
    for (const auto &b : a.blocks) {
        opts.blocks.push_back(parse_pair(b));
    }
    const qic::VerifyReport report = qic::verify_circuit(c, opts);
    for (const auto &b : report.blocks) {
        if (b.skipped) {
            std::cerr << "notice: block (" << b.block_row << "," << b.block_col << ") skipped: " << b.notice << '\n';
        }
    }
    const std::string text = qic::to_json(report).dump(2) + "\n";
    if (a.out.empty()) {
        std::cout << text;
    } else {
        write_text(a.out, text);
    }
    return report.decodes_equal() ? 0 : kExitRuntime;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::string manifest;
    std::vector<std::string> images;
    std::vector<int> q;
    std::vector<std::string> schemes;
    std::string out;
    bool level_shift = false;
    bool emit_circuits = false;
    bool emit_recon = false;
    bool standin = false;
    unsigned threads = 1;
};

int cmd_sweep(const SweepArgs &a, const CLI::App &sub) {
    qic::SweepConfig cfg = config_or_default(a.config);
    if (sub.count("--manifest") > 0) cfg.manifest = a.manifest;
    if (sub.count("--image") > 0) cfg.images = a.images;
    if (sub.count("--q") > 0) cfg.q_factors = a.q;
    if (sub.count("--scheme") > 0) {
        cfg.schemes.clear();
        for (const auto &s : a.schemes) {
            cfg.schemes.push_back(scheme_or_usage(s));
        }
    }
    if (sub.count("--out") > 0) cfg.output_dir = a.out;
    if (sub.count("--level-shift") > 0) cfg.level_shift = a.level_shift;
    if (sub.count("--emit-circuits") > 0) cfg.emit_circuits = a.emit_circuits;
    if (sub.count("--emit-recon") > 0) cfg.emit_recon = a.emit_recon;
    if (sub.count("--standin") > 0) cfg.standin = a.standin;
    if (sub.count("--threads") > 0) cfg.threads = a.threads;
    if (cfg.output_dir.empty()) {
        cfg.output_dir = "sweep_out";
    }
    for (int q : cfg.q_factors) {
        if (q < 1) {
            throw UsageError("--q must be >= 1");
        }
    }

    const qic::DatasetManifest manifest =
        cfg.manifest.empty() ? qic::DatasetManifest::canonical() : qic::DatasetManifest::load(cfg.manifest);
    const qic::SweepResult r = qic::run_sweep(cfg, manifest);
    qic::write_sweep_outputs(r, cfg.output_dir);
    std::cout << qic::sweep_summary(r);
    std::cout << "wrote " << (cfg.output_dir / "sweep.csv").string() << '\n';
    return r.rows.empty() ? kExitRuntime : 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum image compression codec: circuit encode, decode, verify and benchmark sweep"};
    app.require_subcommand(1);

    EncodeArgs enc;
    auto *sub_enc = app.add_subcommand("encode", "Encode an image into a circuit JSON file and a stats row");
    sub_enc->add_option("--image", enc.image, "PGM/PPM/PNG input")->required();
    sub_enc->add_option("--q", enc.q, "Quantization factor (>= 1)")->check(CLI::Range(1, 1 << 20));
    sub_enc->add_option("--scheme", enc.scheme, "mtgsc, scmneqr, dctefrqi or neqr (8x8 inputs only)")
        ->check(CLI::IsMember({"mtgsc", "scmneqr", "dctefrqi", "neqr"}));
    sub_enc->add_option("--config", enc.config, "key=value config file; flags win");
    sub_enc->add_option("--out", enc.out, "Output directory");
    sub_enc->add_option("--stats", enc.stats, "Stats CSV to append to (default <out>/stats.csv)");
    sub_enc->add_flag("--level-shift", enc.level_shift, "Subtract 128 before the transform");
    sub_enc->add_flag("--emit-recon", enc.emit_recon, "Also write the reconstructed image");
    sub_enc->add_flag("--visual", enc.visual, "Also write the column layout for circuit drawing tools (<= 16 qubits)");

    DecodeArgs dec;
    auto *sub_dec = app.add_subcommand("decode", "Reconstruct an image from a circuit JSON file");
    sub_dec->add_option("--circuit", dec.circuit, "Circuit JSON")->required();
    sub_dec->add_option("--width", dec.width, "Image width (default: block extent)");
    sub_dec->add_option("--height", dec.height, "Image height (default: block extent)");
    sub_dec->add_option("--q", dec.q, "Quantization factor used at encode time")->check(CLI::Range(1, 1 << 20));
    sub_dec->add_option("--scheme", dec.scheme, "Scheme label for the output row (default: inferred)")
        ->check(CLI::IsMember({"mtgsc", "scmneqr", "dctefrqi", "neqr"}));
    sub_dec->add_option("--config", dec.config, "key=value config file; flags win");
    sub_dec->add_option("--out", dec.out, "Reconstructed image (.png or PGM)");
    sub_dec->add_option("--original", dec.original, "Original image for MSE/PSNR");
    sub_dec->add_option("--stats", dec.stats, "Quality CSV to append to");
    sub_dec->add_flag("--level-shift", dec.level_shift, "Inputs were level shifted at encode time");

    VerifyArgs ver;
    auto *sub_ver = app.add_subcommand("verify", "Compare full-control and zero-discarding circuits per block");
    sub_ver->add_option("--circuit", ver.circuit, "Circuit JSON");
    sub_ver->add_flag("--demo", ver.demo, "Use a single-coefficient demo block instead of a file");
    sub_ver->add_option("--demo-coeff", ver.demo_coeff, "Demo coefficient as value,x,y")->capture_default_str();
    sub_ver->add_option("--block", ver.blocks, "Block row,col to verify (repeatable)");
    sub_ver->add_option("--blocks", ver.max_blocks, "Number of blocks to sample")->capture_default_str();
    sub_ver->add_option("--out", ver.out, "Report path (default stdout)");

    SweepArgs sw;
    auto *sub_sw = app.add_subcommand("sweep", "Run the images x Q x schemes benchmark");
    sub_sw->add_option("--config", sw.config, "key=value config file; flags win");
    sub_sw->add_option("--manifest", sw.manifest, "Dataset manifest (default: built-in benchmark list)");
    sub_sw->add_option("--image", sw.images, "Manifest names to include")->delimiter(',');
    sub_sw->add_option("--q", sw.q, "Quantization factors")->delimiter(',')->check(CLI::Range(1, 1 << 20));
    sub_sw->add_option("--scheme", sw.schemes, "Schemes")
        ->delimiter(',')
        ->check(CLI::IsMember({"mtgsc", "scmneqr", "dctefrqi", "neqr"}));
    sub_sw->add_option("--out", sw.out, "Output directory (default sweep_out)");
    sub_sw->add_flag("--level-shift", sw.level_shift, "Subtract 128 before the transform");
    sub_sw->add_flag("--emit-circuits", sw.emit_circuits, "Write every circuit JSON");
    sub_sw->add_flag("--emit-recon", sw.emit_recon, "Write every reconstructed image");
    sub_sw->add_flag("--standin", sw.standin, "Synthesize missing images");
    sub_sw->add_option("--threads", sw.threads, "Worker threads")->check(CLI::Range(1u, 256u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (sub_enc->parsed()) return cmd_encode(enc, *sub_enc);
        if (sub_dec->parsed()) return cmd_decode(dec, *sub_dec);
        if (sub_ver->parsed()) return cmd_verify(ver);
        if (sub_sw->parsed()) return cmd_sweep(sw, *sub_sw);
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const qic::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == qic::ErrorCode::QOutOfRange ? kExitUsage : kExitRuntime;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
