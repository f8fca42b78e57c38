#pragma once

/**
 * @file
 * End-to-end chains used by the command-line front end: single-image
 * encode/decode, block-wise equivalence verification and the benchmark
 * sweep with its CSV, plot-data and summary outputs.
 */

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qic/circuit.hpp"
#include "qic/codec.hpp"
#include "qic/encoders.hpp"
#include "qic/error.hpp"
#include "qic/image.hpp"
#include "qic/simulator.hpp"
#include "qic/standin.hpp"
#include "qic/transform.hpp"

namespace qic {

// ---------------------------------------------------------------------------
// Single image

struct EncodeResult {
    Scheme scheme = Scheme::Mtgsc;
    std::size_t width = 0;
    std::size_t height = 0;
    int q_factor = 1;
    std::vector<SparseCoefficient> coeffs; ///< empty for the direct mapping
    std::size_t clamped = 0;
    Circuit circuit;
    GateStats stats;
};

/// Entropy-free classical reference: one sign bit plus the magnitude's bit
/// length for every non-zero coefficient, per pixel. Not a JPEG bitstream.
inline double jpeg_bpp_proxy(const std::vector<SparseCoefficient> &coeffs, std::size_t width, std::size_t height) {
    std::size_t bits = 0;
    for (const auto &k : coeffs) {
        bits += static_cast<std::size_t>(std::bit_width(static_cast<unsigned>(k.magnitude))) + 1;
    }
    return static_cast<double>(bits) / static_cast<double>(width * height);
}

inline EncodeResult encode_quantized(const BlockGrid<QuantizedBlock> &grid, std::size_t width, std::size_t height,
                                     int q, Scheme scheme) {
    EncodeResult r;
    r.scheme = scheme;
    r.width = width;
    r.height = height;
    r.q_factor = q;
    SparsifyStats ss;
    r.coeffs = sparsify(grid, &ss);
    r.clamped = ss.clamped;
    r.circuit = build(scheme, r.coeffs);
    r.stats = count_gates(r.circuit, width, height, scheme);
    return r;
}

/// Transform, quantize, sparsify, build and count. The direct mapping skips
/// the transform and encodes raw pixels (inputs up to 8x8 only).
inline EncodeResult encode_image(const GrayImage &img, int q, Scheme scheme, const TransformOptions &opts = {}) {
    if (q < 1) {
        throw Error(ErrorCode::QOutOfRange, "quantization factor must be >= 1, got " + std::to_string(q));
    }
    if (scheme == Scheme::Neqr) {
        EncodeResult r;
        r.scheme = scheme;
        r.width = img.width();
        r.height = img.height();
        r.q_factor = q;
        r.circuit = build_neqr(img);
        r.stats = count_gates(r.circuit, img.width(), img.height(), scheme);
        return r;
    }
    return encode_quantized(quantize_image(img, q, opts), img.width(), img.height(), q, scheme);
}

/// Best guess at the scheme that produced a circuit. Circuits whose every
/// trigger is fully controlled read as the full-control baseline; the
/// accounting of both reset schemes coincides on such circuits.
inline Scheme infer_scheme(const Circuit &c) {
    if (!c.reg.has_aux()) {
        return Scheme::Neqr;
    }
    bool all_full = true;
    for (const auto &g : c.groups) {
        if (g.first >= c.gates.size() || g.last >= c.gates.size()) {
            throw Error(ErrorCode::InvalidCircuit, "group span out of range");
        }
        const Gate &trigger = c.gates[g.first];
        if (g.last != g.first && c.gates[g.last] == trigger) {
            return Scheme::Dctefrqi;
        }
        all_full = all_full && trigger.controls.size() == c.reg.positions();
    }
    return all_full && !c.groups.empty() ? Scheme::Scmneqr : Scheme::Mtgsc;
}

/// Decodes a circuit into a width x height raster. Coefficient circuits are
/// dequantized with `q` and inverse transformed; direct-mapping circuits
/// carry pixel values.
inline GrayImage decode_image(const Circuit &c, std::size_t width, std::size_t height, int q,
                              const TransformOptions &opts = {}) {
    const auto coeffs = decode_circuit(c);
    if (c.reg.has_aux()) {
        return reconstruct(coeffs, width, height, q, opts);
    }
    GrayImage img(width, height);
    for (const auto &k : coeffs) {
        if (k.x >= width || k.y >= height || k.magnitude > 255) {
            throw Error(ErrorCode::CoefficientOutOfBounds,
                        "pixel (" + std::to_string(k.x) + "," + std::to_string(k.y) + ") outside the image");
        }
        img.at(k.x, k.y) = static_cast<std::uint8_t>(k.magnitude);
    }
    return img;
}

/// Image extent implied by the block addresses in the metadata.
inline std::pair<std::size_t, std::size_t> metadata_extent(const Circuit &c) {
    if (!c.reg.has_aux()) {
        return {std::size_t{1} << c.reg.pos_x, std::size_t{1} << c.reg.pos_y};
    }
    std::size_t rows = 1;
    std::size_t cols = 1;
    for (const auto &g : c.groups) {
        rows = std::max(rows, g.block_row + 1);
        cols = std::max(cols, g.block_col + 1);
    }
    return {cols * kBlockSize, rows * kBlockSize};
}

// ---------------------------------------------------------------------------
// Verification

struct VerifyOptions {
    std::size_t max_blocks = 16;                                ///< sample size when `blocks` is empty
    std::vector<std::pair<std::size_t, std::size_t>> blocks;    ///< explicit (row, col) selection
};

struct BlockVerification {
    std::size_t block_row = 0;
    std::size_t block_col = 0;
    std::size_t coefficients = 0;
    unsigned qubits = 0;
    bool skipped = false;
    std::string notice;
    EquivalenceReport report;
    std::size_t branching_resets = 0;
    bool decodes_equal = true;
    double millis = 0.0;
};

struct VerifyReport {
    std::vector<BlockVerification> blocks;
    std::size_t total_blocks = 0; ///< distinct non-empty blocks in the circuit

    [[nodiscard]] bool decodes_equal() const noexcept {
        return std::all_of(blocks.begin(), blocks.end(), [](const auto &b) { return b.skipped || b.decodes_equal; });
    }
    [[nodiscard]] bool all_equivalent() const noexcept {
        return std::all_of(blocks.begin(), blocks.end(),
                           [](const auto &b) { return b.skipped || b.report.equivalent; });
    }
};

/**
 * Runs one block's coefficients through both the full-control and the
 * zero-discarding construction on a shared register and compares the
 * resulting measurement statistics over every qubit.
 */
inline BlockVerification verify_block(const std::vector<SparseCoefficient> &coeffs, std::size_t row,
                                      std::size_t col) {
    const auto start = std::chrono::steady_clock::now();
    BlockVerification v;
    v.block_row = row;
    v.block_col = col;
    v.coefficients = coeffs.size();
    const QubitRegister reg = register_for(coeffs);
    v.qubits = reg.total();
    if (reg.total() > kMaxSimQubits) {
        v.skipped = true;
        v.notice = "TooManyQubits: block register has " + std::to_string(reg.total()) + " qubits";
        return v;
    }
    const Circuit full = build_scmneqr(coeffs, reg);
    const Circuit modified = build_mtgsc(coeffs, reg);
    v.report = compare_circuits(full, modified, all_qubits(reg.total()));
    v.branching_resets = run_mixed(modified).branching_resets;
    v.decodes_equal = decode_circuit(full) == decode_circuit(modified) && decode_circuit(modified) == coeffs;
    v.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return v;
}

inline VerifyReport verify_circuit(const Circuit &c, const VerifyOptions &opts = {}) {
    const auto coeffs = decode_circuit(c);
    std::map<std::pair<std::size_t, std::size_t>, std::vector<SparseCoefficient>> by_block;
    for (const auto &k : coeffs) {
        by_block[{k.block_row, k.block_col}].push_back(k);
    }
    VerifyReport out;
    out.total_blocks = by_block.size();

    std::vector<std::pair<std::size_t, std::size_t>> chosen = opts.blocks;
    if (chosen.empty()) {
        std::vector<std::pair<std::size_t, std::size_t>> keys;
        for (const auto &[k, v] : by_block) {
            keys.push_back(k);
        }
        const std::size_t n = std::min(opts.max_blocks, keys.size());
        for (std::size_t i = 0; i < n; ++i) {
            chosen.push_back(keys[i * keys.size() / n]);
        }
    }
    for (const auto &addr : chosen) {
        const auto it = by_block.find(addr);
        const std::vector<SparseCoefficient> local = it == by_block.end() ? std::vector<SparseCoefficient>{} : it->second;
        out.blocks.push_back(verify_block(local, addr.first, addr.second));
    }
    return out;
}

inline nlohmann::ordered_json to_json(const VerifyReport &r) {
    nlohmann::ordered_json j;
    j["total_blocks"] = r.total_blocks;
    j["sampled_blocks"] = r.blocks.size();
    j["decodes_equal"] = r.decodes_equal();
    j["all_equivalent"] = r.all_equivalent();
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto &b : r.blocks) {
        nlohmann::ordered_json jb;
        jb["block"] = {b.block_row, b.block_col};
        jb["coefficients"] = b.coefficients;
        jb["qubits"] = b.qubits;
        if (b.skipped) {
            jb["skipped"] = true;
            jb["notice"] = b.notice;
        } else {
            jb["tv_distance"] = b.report.tv_distance;
            jb["max_amp_dev"] = b.report.max_amp_dev;
            jb["equivalent"] = b.report.equivalent;
            jb["branching_resets"] = b.branching_resets;
            jb["decodes_equal"] = b.decodes_equal;
        }
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    return j;
}

// ---------------------------------------------------------------------------
// Sweep configuration

inline constexpr std::array<int, 5> kDefaultQFactors = {8, 16, 32, 36, 70};

struct SweepConfig {
    std::filesystem::path manifest;      ///< empty: the built-in benchmark list
    std::vector<std::string> images;     ///< empty: every manifest entry
    std::vector<int> q_factors{kDefaultQFactors.begin(), kDefaultQFactors.end()};
    std::vector<Scheme> schemes{kDctSchemes.begin(), kDctSchemes.end()};
    std::filesystem::path output_dir;    ///< empty: nothing written
    bool level_shift = false;
    bool emit_circuits = false;
    bool emit_recon = false;
    bool standin = false;                ///< synthesize missing images
    unsigned threads = 1;

    void check() const {
        if (q_factors.empty()) {
            throw Error(ErrorCode::InvalidArgument, "at least one quantization factor is required");
        }
        for (int q : q_factors) {
            if (q < 1) {
                throw Error(ErrorCode::QOutOfRange, "quantization factor must be >= 1, got " + std::to_string(q));
            }
        }
        if (schemes.empty()) {
            throw Error(ErrorCode::InvalidArgument, "at least one scheme is required");
        }
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char ch) { return std::isspace(ch) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
    return s;
}

inline std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

inline bool parse_bool(const std::string &key, const std::string &v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' expects on/off, got '" + v + "'");
}

inline int parse_int(const std::string &key, const std::string &v) {
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

} // namespace detail

inline std::vector<int> parse_q_list(const std::string &s) {
    std::vector<int> out;
    for (const auto &item : detail::split_list(s)) {
        out.push_back(detail::parse_int("q", item));
    }
    return out;
}

inline std::vector<Scheme> parse_scheme_list(const std::string &s) {
    std::vector<Scheme> out;
    for (const auto &item : detail::split_list(s)) {
        const auto k = parse_scheme(item);
        if (!k) {
            throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + item + "'");
        }
        out.push_back(*k);
    }
    return out;
}

/**
 * Flat `key = value` text mirroring the sweep flags (`q`, `scheme`, `image`,
 * `manifest`, `out`, `level-shift`, `emit-circuits`, `emit-recon`,
 * `standin`, `threads`). Lists are comma separated; '#' starts a comment;
 * underscores in keys are accepted in place of dashes.
 */
inline SweepConfig parse_config(std::istream &in, SweepConfig cfg = {}) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key == "q" || key == "q-factors") {
            cfg.q_factors = parse_q_list(value);
        } else if (key == "scheme" || key == "schemes") {
            cfg.schemes = parse_scheme_list(value);
        } else if (key == "image" || key == "images") {
            cfg.images = detail::split_list(value);
        } else if (key == "manifest") {
            cfg.manifest = value;
        } else if (key == "out" || key == "output-dir") {
            cfg.output_dir = value;
        } else if (key == "level-shift") {
            cfg.level_shift = detail::parse_bool(key, value);
        } else if (key == "emit-circuits") {
            cfg.emit_circuits = detail::parse_bool(key, value);
        } else if (key == "emit-recon") {
            cfg.emit_recon = detail::parse_bool(key, value);
        } else if (key == "standin") {
            cfg.standin = detail::parse_bool(key, value);
        } else if (key == "threads") {
            cfg.threads = static_cast<unsigned>(std::max(1, detail::parse_int(key, value)));
        } else {
            throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

inline SweepConfig load_config(const std::filesystem::path &file, SweepConfig cfg = {}) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorCode::FileNotFound, file.string());
    }
    return parse_config(in, std::move(cfg));
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
    std::string image;  ///< manifest name, with a "~standin" suffix for synthetic inputs
    Scheme scheme = Scheme::Mtgsc;
    int q_factor = 0;
    GateStats stats;
    QualityReport quality;
    double jpeg_bpp_proxy = 0.0;
};

struct SweepSkip {
    std::string image;
    std::string reason;
};

struct SweepResult {
    std::vector<SweepRow> rows; ///< manifest order, then Q order, then scheme order
    std::vector<SweepSkip> skipped;
    std::vector<std::string> inconsistent; ///< "image@Q" where scheme reconstructions differ
    std::size_t clamped = 0;

    /// Mean over (image, Q) of 100 * (1 - gpp(MTGSC) / gpp(DCTEFRQI)); nullopt
    /// when the sweep has no such pair.
    [[nodiscard]] std::optional<double> mean_saving() const {
        std::map<std::pair<std::string, int>, std::pair<double, double>> pairs;
        std::map<std::pair<std::string, int>, int> seen;
        for (const auto &r : rows) {
            const auto key = std::make_pair(r.image, r.q_factor);
            if (r.scheme == Scheme::Mtgsc) {
                pairs[key].first = r.stats.gates_per_pixel;
                seen[key] |= 1;
            } else if (r.scheme == Scheme::Dctefrqi) {
                pairs[key].second = r.stats.gates_per_pixel;
                seen[key] |= 2;
            }
        }
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto &[key, p] : pairs) {
            if (seen[key] == 3 && p.second > 0.0) {
                sum += 100.0 * (1.0 - p.first / p.second);
                ++n;
            }
        }
        if (n == 0) {
            return std::nullopt;
        }
        return sum / static_cast<double>(n);
    }
};

inline constexpr std::string_view kSweepCsvHeader =
    "scheme,image,Q,n_tcn,q_o,s_bit,a_bit,b_t,b_rg,b_z,b_s0,bpe,total,gates_per_pixel,mse,psnr,jpeg_bpp_proxy";

inline std::string sweep_csv_row(const SweepRow &r) {
    return stats_csv_row(r.stats, r.scheme, r.image, r.q_factor) + ',' + format_double(r.quality.mse) + ',' +
           format_double(r.quality.psnr) + ',' + format_double(r.jpeg_bpp_proxy);
}

namespace detail {

struct SweepInput {
    std::string label;
    GrayImage image;
};

struct SweepJobOutput {
    std::vector<SweepRow> rows;
    std::size_t clamped = 0;
    bool consistent = true;
    std::string error;
};

inline std::string file_stem(const std::string &label) {
    std::string s = label;
    std::replace(s.begin(), s.end(), '~', '_');
    return s;
}

inline SweepJobOutput run_sweep_job(const SweepInput &in, int q, const SweepConfig &cfg) {
    SweepJobOutput out;
    const TransformOptions opts{cfg.level_shift};
    const GrayImage &img = in.image;
    std::optional<BlockGrid<QuantizedBlock>> grid;
    std::optional<GrayImage> first_recon;
    for (Scheme scheme : cfg.schemes) {
        if (scheme == Scheme::Neqr && (img.width() > kBlockSize || img.height() > kBlockSize)) {
            continue;
        }
        EncodeResult enc;
        GrayImage recon;
        if (scheme == Scheme::Neqr) {
            enc = encode_image(img, q, scheme, opts);
            recon = decode_image(enc.circuit, img.width(), img.height(), q, opts);
        } else {
            if (!grid) {
                grid = quantize_image(img, q, opts);
            }
            enc = encode_quantized(*grid, img.width(), img.height(), q, scheme);
            out.clamped = enc.clamped;
            recon = decode_image(enc.circuit, img.width(), img.height(), q, opts);
            if (!first_recon) {
                first_recon = recon;
            } else if (!(*first_recon == recon)) {
                out.consistent = false;
            }
        }
        SweepRow row;
        row.image = in.label;
        row.scheme = scheme;
        row.q_factor = q;
        row.stats = enc.stats;
        row.quality = psnr(img, recon);
        row.quality.image_name = in.label;
        row.quality.scheme = std::string(to_string(scheme));
        row.quality.q_factor = q;
        row.jpeg_bpp_proxy = scheme == Scheme::Neqr ? 8.0 : jpeg_bpp_proxy(enc.coeffs, img.width(), img.height());
        out.rows.push_back(std::move(row));

        if (!cfg.output_dir.empty()) {
            const std::string stem = file_stem(in.label) + "_q" + std::to_string(q) + "_" + std::string(to_string(scheme));
            if (cfg.emit_circuits) {
                std::ofstream f(cfg.output_dir / "circuits" / (stem + ".json"), std::ios::binary);
                f << serialize(enc.circuit);
                if (!f) {
                    throw Error(ErrorCode::IoFailure, "cannot write circuit " + stem);
                }
            }
            if (cfg.emit_recon) {
                save_image(recon, cfg.output_dir / "recon" / (stem + ".png"));
            }
        }
    }
    return out;
}

} // namespace detail

/// Loads the selected manifest entries, substituting synthetic stand-ins for
/// unavailable files when `cfg.standin` is set.
inline std::vector<detail::SweepInput> load_sweep_inputs(const SweepConfig &cfg, const DatasetManifest &manifest,
                                                         std::vector<SweepSkip> &skipped) {
    std::vector<const ManifestEntry *> selected;
    if (cfg.images.empty()) {
        for (const auto &e : manifest.entries()) {
            selected.push_back(&e);
        }
    } else {
        for (const auto &name : cfg.images) {
            const ManifestEntry *e = manifest.find(name);
            if (e == nullptr) {
                skipped.push_back({name, "not in manifest"});
            } else {
                selected.push_back(e);
            }
        }
    }
    std::vector<detail::SweepInput> inputs;
    for (const ManifestEntry *e : selected) {
        std::string why;
        if (auto img = manifest.try_load(*e, &why)) {
            inputs.push_back({e->name, std::move(*img)});
        } else if (cfg.standin && e->expected_width > 0 && e->expected_height > 0) {
            inputs.push_back({e->name + "~standin", make_standin(e->name, e->expected_width, e->expected_height)});
        } else {
            skipped.push_back({e->name, why});
        }
    }
    return inputs;
}

/**
 * Full cross product of images, Q factors and schemes. Jobs are (image, Q)
 * pairs spread over `cfg.threads` workers; results land in a slot per job so
 * output order depends only on the configuration.
 */
inline SweepResult run_sweep(const SweepConfig &cfg, const DatasetManifest &manifest) {
    cfg.check();
    SweepResult result;
    const auto inputs = load_sweep_inputs(cfg, manifest, result.skipped);
    const bool wants_neqr = std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::Neqr) != cfg.schemes.end();
    for (const auto &in : inputs) {
        if (wants_neqr && (in.image.width() > kBlockSize || in.image.height() > kBlockSize)) {
            result.skipped.push_back({in.label, "neqr: direct mapping is limited to 8x8 inputs"});
        }
    }

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        if (cfg.emit_circuits) {
            std::filesystem::create_directories(cfg.output_dir / "circuits");
        }
        if (cfg.emit_recon) {
            std::filesystem::create_directories(cfg.output_dir / "recon");
        }
    }

    const std::size_t njobs = inputs.size() * cfg.q_factors.size();
    std::vector<detail::SweepJobOutput> slots(njobs);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t j = next++; j < njobs; j = next++) {
            const auto &in = inputs[j / cfg.q_factors.size()];
            const int q = cfg.q_factors[j % cfg.q_factors.size()];
            try {
                slots[j] = detail::run_sweep_job(in, q, cfg);
            } catch (const std::exception &e) {
                slots[j].error = e.what();
            }
        }
    };
    const unsigned nthreads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(std::max<std::size_t>(njobs, 1))));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
    }

    for (std::size_t j = 0; j < njobs; ++j) {
        auto &slot = slots[j];
        const auto &in = inputs[j / cfg.q_factors.size()];
        const int q = cfg.q_factors[j % cfg.q_factors.size()];
        if (!slot.error.empty()) {
            result.skipped.push_back({in.label + "@Q" + std::to_string(q), slot.error});
            continue;
        }
        if (!slot.consistent) {
            result.inconsistent.push_back(in.label + "@Q" + std::to_string(q));
        }
        result.clamped += slot.clamped;
        std::move(slot.rows.begin(), slot.rows.end(), std::back_inserter(result.rows));
    }
    return result;
}

inline void write_sweep_csv(const SweepResult &r, std::ostream &out) {
    out << kSweepCsvHeader << '\n';
    for (const auto &row : r.rows) {
        out << sweep_csv_row(row) << '\n';
    }
}

/// gnuplot-style data: one `# scheme` headed index per scheme, columns
/// gates_per_pixel and psnr, one line per Q, indices separated by two blank lines.
inline std::map<std::string, std::string> plot_data(const SweepResult &r) {
    std::map<std::string, std::map<Scheme, std::vector<const SweepRow *>>> series;
    std::vector<std::string> order;
    for (const auto &row : r.rows) {
        if (!series.contains(row.image)) {
            order.push_back(row.image);
        }
        series[row.image][row.scheme].push_back(&row);
    }
    std::map<std::string, std::string> out;
    for (const auto &image : order) {
        std::string text = "# " + image + ": gates_per_pixel psnr Q\n";
        bool first = true;
        for (const auto &[scheme, rows] : series[image]) {
            if (!first) {
                text += "\n\n";
            }
            first = false;
            text += "# " + std::string(to_string(scheme)) + "\n";
            for (const SweepRow *row : rows) {
                text += format_double(row->stats.gates_per_pixel) + ' ' + format_double(row->quality.psnr) + ' ' +
                        std::to_string(row->q_factor) + '\n';
            }
        }
        out[image] = std::move(text);
    }
    return out;
}

inline std::string sweep_summary(const SweepResult &r) {
    std::ostringstream s;
    const auto saving = r.mean_saving();
    s << "rows: " << r.rows.size() << '\n';
    if (saving) {
        s << "mean gate saving mtgsc vs dctefrqi: " << format_double(std::round(*saving * 100.0) / 100.0) << "%\n";
    } else {
        s << "mean gate saving mtgsc vs dctefrqi: n/a (needs both schemes)\n";
    }
    if (r.clamped > 0) {
        s << "clamped coefficients: " << r.clamped << '\n';
    }
    for (const auto &k : r.skipped) {
        s << "skipped " << k.image << ": " << k.reason << '\n';
    }
    for (const auto &k : r.inconsistent) {
        s << "inconsistent reconstructions: " << k << '\n';
    }
    return s.str();
}

/// Writes sweep.csv, plot_<image>.dat and summary.txt into `dir`.
inline void write_sweep_outputs(const SweepResult &r, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "sweep.csv", std::ios::binary);
        write_sweep_csv(r, csv);
        if (!csv) {
            throw Error(ErrorCode::IoFailure, (dir / "sweep.csv").string());
        }
    }
    for (const auto &[image, text] : plot_data(r)) {
        std::ofstream f(dir / ("plot_" + detail::file_stem(image) + ".dat"), std::ios::binary);
        f << text;
        if (!f) {
            throw Error(ErrorCode::IoFailure, "cannot write plot data for " + image);
        }
    }
    std::ofstream summary(dir / "summary.txt", std::ios::binary);
    summary << sweep_summary(r);
    if (!summary) {
        throw Error(ErrorCode::IoFailure, (dir / "summary.txt").string());
    }
}

} // namespace qic
