#include "rtvae/data/dataset_io.hpp"

#include "rtvae/atomic_write.hpp"
#include "rtvae/errors.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rtvae {

namespace {

constexpr std::array<char, 5> kMagic{'R', 'T', 'V', 'D', '1'};

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

void put_u32(std::ostream& out, std::uint64_t v) {
    if (v > 0xffffffffULL) {
        throw DataError("value too large for u32 field in dataset cache");
    }
    for (int i = 0; i < 4; ++i) {
        out.put(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
}

void put_bytes(std::ostream& out, std::string_view s) {
    put_u32(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void read(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw ParseError("dataset cache truncated");
        }
    }
    std::uint8_t u8() {
        char c = 0;
        read(&c, 1);
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() {
        std::array<unsigned char, 4> b{};
        read(reinterpret_cast<char*>(b.data()), b.size());
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    }
    double f64() {
        std::array<unsigned char, 8> b{};
        read(reinterpret_cast<char*>(b.data()), b.size());
        std::uint64_t bits = 0;
        for (int i = 7; i >= 0; --i) {
            bits = (bits << 8) | b[static_cast<std::size_t>(i)];
        }
        return std::bit_cast<double>(bits);
    }
    std::string bytes() {
        std::string s(u32(), '\0');
        read(s.data(), s.size());
        return s;
    }

private:
    std::istream& in_;
};

} // namespace

void write_dataset_cache(std::ostream& out, const DatasetCache& cache) {
    const EncodedDataset& ds = cache.data;
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, ds.x.rows());
    put_u32(out, ds.x.cols());
    put_u32(out, ds.layout.size());
    for (const auto& slot : ds.layout) {
        put_bytes(out, slot.column);
        put_u8(out, slot.kind == ColumnKind::categorical ? 0 : 1);
        put_u32(out, slot.offset);
        put_u32(out, slot.width);
    }
    put_u8(out, ds.has_labels() ? 1 : 0);
    for (Label l : ds.labels) {
        put_u8(out, static_cast<std::uint8_t>(l));
    }
    put_bytes(out, nlohmann::json(cache.encoder).dump());
    for (double v : ds.x.values()) {
        put_f64(out, v);
    }
}

DatasetCache read_dataset_cache(std::istream& in) {
    Reader r(in);
    std::array<char, 5> magic{};
    r.read(magic.data(), magic.size());
    if (magic != kMagic) {
        throw ParseError("not an RTVD1 dataset cache");
    }
    DatasetCache cache;
    EncodedDataset& ds = cache.data;
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    const std::uint32_t slots = r.u32();
    for (std::uint32_t i = 0; i < slots; ++i) {
        FeatureSlot slot;
        slot.column = r.bytes();
        const std::uint8_t kind = r.u8();
        if (kind > 1) {
            throw ParseError("dataset cache: bad slot kind");
        }
        slot.kind = kind == 0 ? ColumnKind::categorical : ColumnKind::continuous;
        slot.offset = r.u32();
        slot.width = r.u32();
        ds.layout.push_back(std::move(slot));
    }
    const std::uint8_t has_labels = r.u8();
    if (has_labels > 1) {
        throw ParseError("dataset cache: bad label flag");
    }
    if (has_labels == 1) {
        ds.labels.reserve(rows);
        for (std::uint32_t i = 0; i < rows; ++i) {
            const std::uint8_t l = r.u8();
            if (l > 1) {
                throw ParseError("dataset cache: bad label value");
            }
            ds.labels.push_back(static_cast<Label>(l));
        }
    }
    try {
        cache.encoder = nlohmann::json::parse(r.bytes()).get<EncoderState>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("dataset cache: bad encoder state: ") + e.what());
    }
    std::vector<double> data(static_cast<std::size_t>(rows) * cols);
    for (double& v : data) {
        v = r.f64();
    }
    ds.x = Matrix(rows, cols, std::move(data));
    ds.fingerprint = cache.encoder.fingerprint();

    if (ds.layout != cache.encoder.layout() || layout_width(ds.layout) != cols) {
        throw ParseError("dataset cache: layout table disagrees with encoder state");
    }
    return cache;
}

void save_dataset_cache(const std::filesystem::path& path, const DatasetCache& cache) {
    std::ostringstream buffer(std::ios::binary);
    write_dataset_cache(buffer, cache);
    write_file_atomically(path, buffer.str());
}

DatasetCache load_dataset_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open dataset cache " + path.string());
    }
    return read_dataset_cache(in);
}

} // namespace rtvae
