#pragma once

/**
 * @file
 * Grayscale raster type, PGM/PNG input and output, block padding and the
 * benchmark dataset manifest.
 */

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>

#include "qic/error.hpp"

namespace qic {

/// Width x height 8-bit luminance raster, row-major.
class GrayImage {
  public:
    GrayImage() = default;

    GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0)
        : GrayImage(width, height, std::vector<std::uint8_t>(width * height, fill)) {}

    GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (width_ == 0 || height_ == 0) {
            throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
        }
        if (pixels_.size() != width_ * height_) {
            throw Error(ErrorCode::InvalidArgument, "pixel count does not match width x height");
        }
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }
    [[nodiscard]] bool empty() const noexcept { return pixels_.empty(); }

    [[nodiscard]] std::uint8_t at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
    std::uint8_t &at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

    [[nodiscard]] const std::vector<std::uint8_t> &pixels() const noexcept { return pixels_; }
    std::vector<std::uint8_t> &pixels() noexcept { return pixels_; }

    friend bool operator==(const GrayImage &, const GrayImage &) = default;

  private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// ITU-R BT.601 luma, round(0.299R + 0.587G + 0.114B), in exact integer form.
constexpr std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

namespace detail {

inline std::vector<unsigned char> read_file(const std::filesystem::path &path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorCode::FileNotFound, path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::FileNotFound, path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Cursor over a netpbm header: whitespace and '#' comments between tokens.
class PnmCursor {
  public:
    explicit PnmCursor(const std::vector<unsigned char> &bytes) : bytes_(bytes) {}

    long next_int(const char *what) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || std::isdigit(bytes_[pos_]) == 0) {
            throw Error(ErrorCode::CorruptHeader, std::string("expected ") + what);
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_]) != 0) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) {
                throw Error(ErrorCode::CorruptHeader, std::string(what) + " out of range");
            }
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates the header from binary samples.
    void skip_single_space() {
        if (pos_ >= bytes_.size() || std::isspace(bytes_[pos_]) == 0) {
            throw Error(ErrorCode::CorruptHeader, "missing separator before raster data");
        }
        ++pos_;
    }

    [[nodiscard]] std::size_t position() const noexcept { return pos_; }
    void seek(std::size_t pos) noexcept { pos_ = pos; }

  private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_]) != 0) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    const std::vector<unsigned char> &bytes_;
    std::size_t pos_ = 2;
};

inline std::uint8_t rescale(long value, long maxval) {
    if (value > maxval) {
        throw Error(ErrorCode::CorruptHeader, "sample exceeds maxval");
    }
    if (maxval == 255) {
        return static_cast<std::uint8_t>(value);
    }
    return static_cast<std::uint8_t>((value * 255 + maxval / 2) / maxval);
}

inline GrayImage decode_pnm(const std::vector<unsigned char> &bytes) {
    const char kind = static_cast<char>(bytes[1]);
    const bool color = kind == '3' || kind == '6';
    const bool ascii = kind == '2' || kind == '3';

    PnmCursor cur(bytes);
    const long width = cur.next_int("width");
    const long height = cur.next_int("height");
    const long maxval = cur.next_int("maxval");
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::CorruptHeader, "non-positive dimensions");
    }
    if (maxval <= 0 || maxval > 255) {
        throw Error(ErrorCode::UnsupportedFormat, "only 8-bit netpbm (maxval <= 255) is supported");
    }
    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t channels = color ? 3 : 1;
    std::vector<std::uint8_t> samples(count * channels);

    if (ascii) {
        for (auto &s : samples) {
            s = rescale(cur.next_int("sample"), maxval);
        }
    } else {
        cur.skip_single_space();
        const std::size_t start = cur.position();
        if (bytes.size() - start < samples.size()) {
            throw Error(ErrorCode::CorruptHeader, "raster data truncated");
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i] = rescale(bytes[start + i], maxval);
        }
    }

    if (!color) {
        return {static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(samples)};
    }
    std::vector<std::uint8_t> gray(count);
    for (std::size_t i = 0; i < count; ++i) {
        gray[i] = luma(samples[3 * i], samples[3 * i + 1], samples[3 * i + 2]);
    }
    return {static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(gray)};
}

struct PngImageGuard {
    png_image image{};
    PngImageGuard() {
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImageGuard() { png_image_free(&image); }
    PngImageGuard(const PngImageGuard &) = delete;
    PngImageGuard &operator=(const PngImageGuard &) = delete;
};

inline GrayImage decode_png(const std::vector<unsigned char> &bytes) {
    PngImageGuard guard;
    png_image &img = guard.image;
    if (png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()) == 0) {
        throw Error(ErrorCode::CorruptHeader, std::string("png: ") + img.message);
    }
    const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
    if (png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr) == 0) {
        throw Error(ErrorCode::CorruptHeader, std::string("png: ") + img.message);
    }
    const std::size_t width = img.width;
    const std::size_t height = img.height;
    if (!color) {
        return {width, height, std::move(buffer)};
    }
    std::vector<std::uint8_t> gray(width * height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        gray[i] = luma(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]);
    }
    return {width, height, std::move(gray)};
}

inline bool has_png_extension(const std::filesystem::path &path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png";
}

} // namespace detail

/**
 * Loads a PGM (P2/P5), PPM (P3/P6) or 8-bit PNG file. Color inputs are
 * converted to BT.601 luma. The format is detected from the file's magic
 * bytes, not its extension.
 */
inline GrayImage load_image(const std::filesystem::path &path) {
    const auto bytes = detail::read_file(path);
    static constexpr unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::equal(std::begin(png_sig), std::end(png_sig), bytes.begin())) {
        return detail::decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' &&
        (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6')) {
        return detail::decode_pnm(bytes);
    }
    throw Error(ErrorCode::UnsupportedFormat, path.string());
}

/// Writes binary PGM, or grayscale PNG when the path ends in ".png".
inline void save_image(const GrayImage &img, const std::filesystem::path &path) {
    if (detail::has_png_extension(path)) {
        detail::PngImageGuard guard;
        png_image &out = guard.image;
        out.width = static_cast<png_uint_32>(img.width());
        out.height = static_cast<png_uint_32>(img.height());
        out.format = PNG_FORMAT_GRAY;
        if (png_image_write_to_file(&out, path.string().c_str(), 0, img.pixels().data(), 0, nullptr) == 0) {
            throw Error(ErrorCode::IoFailure, path.string() + ": " + out.message);
        }
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    }
    file << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    file.write(reinterpret_cast<const char *>(img.pixels().data()),
               static_cast<std::streamsize>(img.pixels().size()));
    if (!file) {
        throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
    }
}

inline constexpr std::size_t round_up(std::size_t value, std::size_t multiple) noexcept {
    return (value + multiple - 1) / multiple * multiple;
}

/// Grows the raster to the next multiple of `block` in each direction by
/// replicating the last column and row.
inline GrayImage pad_to_block_multiple(const GrayImage &img, std::size_t block = 8) {
    const std::size_t w = round_up(img.width(), block);
    const std::size_t h = round_up(img.height(), block);
    if (w == img.width() && h == img.height()) {
        return img;
    }
    GrayImage out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t sy = std::min(y, img.height() - 1);
        for (std::size_t x = 0; x < w; ++x) {
            out.at(x, y) = img.at(std::min(x, img.width() - 1), sy);
        }
    }
    return out;
}

/// Top-left `width` x `height` region.
inline GrayImage crop(const GrayImage &img, std::size_t width, std::size_t height) {
    if (width > img.width() || height > img.height()) {
        throw Error(ErrorCode::DimensionMismatch, "crop region exceeds image");
    }
    GrayImage out(width, height);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            out.at(x, y) = img.at(x, y);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset manifest

struct ManifestEntry {
    std::string name;
    std::filesystem::path path;
    std::size_t expected_width = 0;
    std::size_t expected_height = 0;

    friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

/**
 * Plain-text table of benchmark images, one `name path width height` row per
 * line, '#' starting a comment. Relative paths resolve against the dataset
 * root: the QIC_DATASET_DIR environment variable when set, otherwise the
 * directory containing the manifest file.
 */
class DatasetManifest {
  public:
    DatasetManifest() = default;

    DatasetManifest(std::vector<ManifestEntry> entries, std::filesystem::path root = {})
        : entries_(std::move(entries)), root_(std::move(root)) {
        std::set<std::string> seen;
        for (const auto &e : entries_) {
            if (!seen.insert(e.name).second) {
                throw Error(ErrorCode::InvalidArgument, "duplicate manifest entry '" + e.name + "'");
            }
        }
    }

    static DatasetManifest parse(std::istream &in, std::filesystem::path root = {}) {
        std::vector<ManifestEntry> entries;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            std::istringstream fields(line);
            ManifestEntry e;
            std::string path;
            if (!(fields >> e.name)) {
                continue;
            }
            if (!(fields >> path >> e.expected_width >> e.expected_height)) {
                throw Error(ErrorCode::CorruptHeader, "manifest line " + std::to_string(line_no) +
                                                          ": expected 'name path width height'");
            }
            e.path = path;
            entries.push_back(std::move(e));
        }
        return {std::move(entries), std::move(root)};
    }

    static DatasetManifest load(const std::filesystem::path &file) {
        std::ifstream in(file);
        if (!in) {
            throw Error(ErrorCode::FileNotFound, file.string());
        }
        return parse(in, file.parent_path());
    }

    /// The eight-image benchmark inventory with its published sizes.
    static DatasetManifest canonical() {
        return DatasetManifest({
            {"deer", "deer.png", 1024, 1024},
            {"baboon", "baboon.png", 512, 512},
            {"scenery", "scenery.png", 512, 512},
            {"airport", "airport.png", 1024, 1024},
            {"building", "building.png", 512, 512},
            {"peppers", "peppers.png", 512, 512},
            {"grass", "grass.png", 512, 512},
            {"house", "house.png", 512, 512},
        });
    }

    [[nodiscard]] const std::vector<ManifestEntry> &entries() const noexcept { return entries_; }

    [[nodiscard]] const ManifestEntry *find(std::string_view name) const {
        const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto &e) { return e.name == name; });
        return it == entries_.end() ? nullptr : &*it;
    }

    [[nodiscard]] std::filesystem::path root() const {
        if (const char *env = std::getenv("QIC_DATASET_DIR"); env != nullptr && *env != '\0') {
            return env;
        }
        return root_;
    }

    [[nodiscard]] std::filesystem::path resolve(const ManifestEntry &entry) const {
        if (entry.path.is_absolute()) {
            return entry.path;
        }
        return root() / entry.path;
    }

    /// Loads an entry if its file exists and has the expected size.
    [[nodiscard]] std::optional<GrayImage> try_load(const ManifestEntry &entry, std::string *why = nullptr) const {
        const auto path = resolve(entry);
        try {
            GrayImage img = load_image(path);
            if (entry.expected_width != 0 &&
                (img.width() != entry.expected_width || img.height() != entry.expected_height)) {
                if (why != nullptr) {
                    *why = path.string() + " is " + std::to_string(img.width()) + "x" +
                           std::to_string(img.height()) + ", expected " + std::to_string(entry.expected_width) +
                           "x" + std::to_string(entry.expected_height);
                }
                return std::nullopt;
            }
            return img;
        } catch (const Error &e) {
            if (why != nullptr) {
                *why = e.what();
            }
            return std::nullopt;
        }
    }

  private:
    std::vector<ManifestEntry> entries_;
    std::filesystem::path root_;
};

} // namespace qic
