#include "sigmafilt/io.hpp"

#include <bit>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sigmafilt {

namespace {

[[noreturn]] void fail_parse(const std::filesystem::path& path, const std::string& why) {
    throw ParseError(path.string() + ": " + why);
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) {
        throw ParseError("cannot open " + path.string() + " for reading");
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    return out;
}

// PGM header tokens are separated by whitespace; '#' starts a comment that
// runs to the end of the line.
std::string next_pgm_token(std::istream& in) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            token.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
    }
    if (c == '#') {
        in.unget();
    }
    return token;
}

long parse_long(const std::string& token, const std::filesystem::path& path) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        fail_parse(path, "bad integer '" + token + "' in PGM header");
    }
    return value;
}

void put_u32_le(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

std::uint32_t get_u32_le(std::istream& in, const std::filesystem::path& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        fail_parse(path, "truncated tensor file");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64_le(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    }
    out.write(b, 8);
}

double get_f64_le(std::istream& in, const std::filesystem::path& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) {
        fail_parse(path, "truncated tensor payload");
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return std::bit_cast<double>(bits);
}

} // namespace

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

ImagePlane read_pgm(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::binary);

    const std::string magic = next_pgm_token(in);
    if (magic != "P2" && magic != "P5") {
        fail_parse(path, "not a PGM file (magic '" + magic + "')");
    }
    const long width = parse_long(next_pgm_token(in), path);
    const long height = parse_long(next_pgm_token(in), path);
    const long maxval = parse_long(next_pgm_token(in), path);
    if (width < 1 || height < 1) {
        fail_parse(path, "bad PGM dimensions");
    }
    if (maxval < 1 || maxval > 65535) {
        fail_parse(path, "unsupported PGM maxval " + std::to_string(maxval));
    }

    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<double> values(n);
    const double scale = 1.0 / static_cast<double>(maxval);

    if (magic == "P2") {
        for (std::size_t i = 0; i < n; ++i) {
            const std::string token = next_pgm_token(in);
            if (token.empty()) {
                fail_parse(path, "truncated P2 pixel data");
            }
            values[i] = static_cast<double>(parse_long(token, path)) * scale;
        }
    } else {
        // The maxval line ends with exactly one whitespace byte before the
        // raster (next_pgm_token has already consumed it via the trailing
        // delimiter read).
        const bool wide = maxval > 255;
        std::vector<unsigned char> raw(n * (wide ? 2 : 1));
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
            fail_parse(path, "truncated P5 pixel data");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned v = wide ? (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1]
                                    : raw[i];
            values[i] = static_cast<double>(v) * scale;
        }
    }
    return ImagePlane::from_values(static_cast<int>(height), static_cast<int>(width),
                                   std::move(values));
}

void write_pgm(const std::filesystem::path& path, const ImagePlane& image, int maxval) {
    if (maxval != 255 && maxval != 65535) {
        throw DomainError("write_pgm: maxval must be 255 or 65535");
    }
    std::ofstream out = open_output(path, std::ios::binary);
    out << "P5\n" << image.width() << " " << image.height() << "\n" << maxval << "\n";

    const bool wide = maxval > 255;
    for (double v : image.values()) {
        const double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        const auto q = static_cast<unsigned>(std::llround(clamped * maxval));
        if (wide) {
            out.put(static_cast<char>((q >> 8) & 0xff)); // big-endian per PGM
            out.put(static_cast<char>(q & 0xff));
        } else {
            out.put(static_cast<char>(q & 0xff));
        }
    }
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

RawTensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::binary);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "GFT1", 4) != 0) {
        fail_parse(path, "not a GFT1 tensor file");
    }
    const std::uint32_t ndim = get_u32_le(in, path);
    if (ndim < 1 || ndim > 3) {
        fail_parse(path, "tensor ndim must be 1..3, got " + std::to_string(ndim));
    }
    RawTensor t;
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < ndim; ++i) {
        const std::uint32_t dim = get_u32_le(in, path);
        if (dim == 0) {
            fail_parse(path, "zero tensor dimension");
        }
        t.dims.push_back(dim);
        count *= dim;
    }
    t.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        t.data[i] = get_f64_le(in, path);
    }
    return t;
}

void write_tensor(const std::filesystem::path& path, const RawTensor& tensor) {
    if (tensor.dims.empty() || tensor.dims.size() > 3) {
        throw ShapeError("tensor ndim must be 1..3");
    }
    std::size_t count = 1;
    for (std::uint32_t d : tensor.dims) {
        count *= d;
    }
    if (count != tensor.data.size()) {
        throw ShapeError("tensor payload does not match dims");
    }
    std::ofstream out = open_output(path, std::ios::binary);
    out.write("GFT1", 4);
    put_u32_le(out, static_cast<std::uint32_t>(tensor.dims.size()));
    for (std::uint32_t d : tensor.dims) {
        put_u32_le(out, d);
    }
    for (double v : tensor.data) {
        put_f64_le(out, v);
    }
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

CovField read_cov_field(const std::filesystem::path& path) {
    const RawTensor t = read_tensor(path);
    if (t.dims.size() != 3) {
        throw ShapeError(path.string() + ": covariance field tensor must have shape (H, W, d)");
    }
    const auto h = static_cast<int>(t.dims[0]);
    const auto w = static_cast<int>(t.dims[1]);
    const auto d = static_cast<int>(t.dims[2]);
    CovFamily family;
    switch (d) {
    case 1: family = CovFamily::spherical; break;
    case 2: family = CovFamily::diagonal; break;
    case 3: family = CovFamily::full; break;
    default:
        throw ShapeError(path.string() + ": covariance field depth must be 1, 2 or 3, got " +
                         std::to_string(d));
    }
    for (double v : t.data) {
        if (!std::isfinite(v)) {
            throw DomainError(path.string() + ": covariance field has non-finite entries");
        }
    }
    CovField field(h, w, family);
    std::copy(t.data.begin(), t.data.end(), field.raw().begin());
    return field;
}

void write_cov_field(const std::filesystem::path& path, const CovField& field) {
    RawTensor t;
    t.dims = {static_cast<std::uint32_t>(field.height()), static_cast<std::uint32_t>(field.width()),
              static_cast<std::uint32_t>(field.param_count())};
    t.data.assign(field.raw().begin(), field.raw().end());
    write_tensor(path, t);
}

ImagePlane tensor_to_image(const RawTensor& tensor) {
    if (tensor.dims.size() != 2) {
        throw ShapeError("image tensor must have shape (H, W)");
    }
    std::vector<double> values(tensor.data);
    return ImagePlane::from_values(static_cast<int>(tensor.dims[0]),
                                   static_cast<int>(tensor.dims[1]), std::move(values));
}

RawTensor image_to_tensor(const ImagePlane& image) {
    RawTensor t;
    t.dims = {static_cast<std::uint32_t>(image.height()), static_cast<std::uint32_t>(image.width())};
    t.data.assign(image.values().begin(), image.values().end());
    return t;
}

void write_kernel_csv(std::ostream& out, const KernelGrid& kernel) {
    out << "# ry=" << kernel.ry() << " rx=" << kernel.rx()
        << " kind=" << kernel_kind_name(kernel.kind()) << "\n";
    for (int dy = -kernel.ry(); dy <= kernel.ry(); ++dy) {
        for (int dx = -kernel.rx(); dx <= kernel.rx(); ++dx) {
            if (dx > -kernel.rx()) {
                out << ",";
            }
            out << format_double(kernel.at(dy, dx));
        }
        out << "\n";
    }
}

void write_kernel_csv(const std::filesystem::path& path, const KernelGrid& kernel) {
    std::ofstream out = open_output(path, std::ios::out);
    write_kernel_csv(out, kernel);
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

KernelGrid read_kernel_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw ParseError("empty kernel CSV");
    }
    int ry = -1;
    int rx = -1;
    char kind_buf[32] = {0};
    if (std::sscanf(header.c_str(), "# ry=%d rx=%d kind=%31s", &ry, &rx, kind_buf) != 3 ||
        ry < 0 || rx < 0) {
        throw ParseError("kernel CSV must start with '# ry=<ry> rx=<rx> kind=<kind>', got '" +
                         header + "'");
    }
    const KernelKind kind = parse_kernel_kind(kind_buf);

    KernelGrid k(ry, rx, kind);
    std::string line;
    for (int dy = -ry; dy <= ry; ++dy) {
        if (!std::getline(in, line)) {
            throw ParseError("kernel CSV: expected " + std::to_string(2 * ry + 1) +
                             " rows, file ended early");
        }
        std::size_t pos = 0;
        for (int dx = -rx; dx <= rx; ++dx) {
            const std::size_t comma = line.find(',', pos);
            const std::string token =
                line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
            if (ec != std::errc{} || ptr != token.data() + token.size()) {
                throw ParseError("kernel CSV: bad coefficient '" + token + "'");
            }
            k.at(dy, dx) = value;
            if (comma == std::string::npos) {
                if (dx != rx) {
                    throw ParseError("kernel CSV: row has too few columns");
                }
                pos = line.size();
            } else {
                pos = comma + 1;
            }
        }
        if (pos < line.size() && line.find(',', pos) != std::string::npos) {
            throw ParseError("kernel CSV: row has too many columns");
        }
    }
    return k;
}

KernelGrid read_kernel_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::in);
    try {
        return read_kernel_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& trajectory) {
    out << "step,loss,grad_norm";
    if (!trajectory.empty()) {
        for (int i = 0; i < trajectory.front().params.size(); ++i) {
            out << ",p" << (i + 1);
        }
    }
    out << "\n";
    for (const TrajectoryPoint& point : trajectory) {
        out << point.step << "," << format_double(point.loss) << ","
            << format_double(point.grad_norm);
        for (int i = 0; i < point.params.size(); ++i) {
            out << "," << format_double(point.params[i]);
        }
        out << "\n";
    }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryPoint>& trajectory) {
    std::ofstream out = open_output(path, std::ios::out);
    write_trajectory_csv(out, trajectory);
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

} // namespace sigmafilt
