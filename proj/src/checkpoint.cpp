#include "bowae/checkpoint.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "bowae/error.hpp"

namespace bowae {

namespace {

constexpr std::array<char, 8> kMagic{'B', 'O', 'W', 'A', 'E', 'C', 'K', 'P'};

// All integers and doubles are little-endian on disk.
template <typename UInt>
void put_uint(std::ostream& out, UInt value) {
    std::array<char, sizeof(UInt)> bytes{};
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_uint(std::istream& in) {
    std::array<unsigned char, sizeof(UInt)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) {
        throw Error("truncated checkpoint");
    }
    UInt value = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        value |= static_cast<UInt>(bytes[i]) << (8 * i);
    }
    return value;
}

void put_string(std::ostream& out, const std::string& text) {
    put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string get_string(std::istream& in) {
    const auto size = get_uint<std::uint32_t>(in);
    std::string text(size, '\0');
    in.read(text.data(), size);
    if (!in) {
        throw Error("truncated checkpoint");
    }
    return text;
}

void put_double(std::ostream& out, double value) { put_uint(out, std::bit_cast<std::uint64_t>(value)); }
double get_double(std::istream& in) { return std::bit_cast<double>(get_uint<std::uint64_t>(in)); }

// Writes a logical rows x cols matrix in row-major order.
template <typename Mat>
void put_array(std::ostream& out, const std::string& name, const Mat& m) {
    put_string(out, name);
    put_uint<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put_uint<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put_double(out, m(r, c));
        }
    }
}

template <typename Mat>
void get_array(std::istream& in, const std::string& name, Mat& m) {
    const std::string found = get_string(in);
    if (found != name) {
        throw Error("checkpoint array '" + found + "' where '" + name + "' was expected");
    }
    const auto rows = get_uint<std::uint64_t>(in);
    const auto cols = get_uint<std::uint64_t>(in);
    if (rows != static_cast<std::uint64_t>(m.rows()) || cols != static_cast<std::uint64_t>(m.cols())) {
        throw Error("checkpoint array '" + name + "' has shape " + std::to_string(rows) + "x" +
                    std::to_string(cols) + ", expected " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = get_double(in);
        }
    }
}

void put_language(std::ostream& out, const LanguageParams& side) {
    put_uint<std::uint64_t>(out, side.tree.seed());
    put_uint<std::uint64_t>(out, side.vocab.size());
    for (std::size_t i = 0; i < side.vocab.size(); ++i) {
        put_string(out, side.vocab.words()[i]);
        put_uint<std::uint64_t>(out, static_cast<std::uint64_t>(side.vocab.counts()[i]));
    }
}

struct LanguageHeader {
    std::uint64_t tree_seed = 0;
    Vocabulary vocab;
};

LanguageHeader get_language(std::istream& in) {
    LanguageHeader header;
    header.tree_seed = get_uint<std::uint64_t>(in);
    const auto size = get_uint<std::uint64_t>(in);
    std::vector<std::pair<std::string, std::int64_t>> entries;
    entries.reserve(size);
    for (std::uint64_t i = 0; i < size; ++i) {
        std::string token = get_string(in);
        const auto count = static_cast<std::int64_t>(get_uint<std::uint64_t>(in));
        entries.emplace_back(std::move(token), count);
    }
    header.vocab = Vocabulary(std::move(entries));
    return header;
}

}  // namespace

void write_checkpoint(std::ostream& out, const BilingualModel& model) {
    out.write(kMagic.data(), kMagic.size());
    put_uint<std::uint32_t>(out, kCheckpointVersion);
    put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(model.dim));
    put_uint<std::uint8_t>(out, model.nonlinearity == Nonlinearity::tanh ? 0 : 1);
    put_language(out, model.x);
    put_language(out, model.y);
    put_uint<std::uint32_t>(out, 7);
    put_array(out, "W_x", model.x.embeddings);
    put_array(out, "W_y", model.y.embeddings);
    put_array(out, "c", model.hidden_bias);
    put_array(out, "b_x", model.x.decoder_bias);
    put_array(out, "U_x", model.x.decoder_weights);
    put_array(out, "b_y", model.y.decoder_bias);
    put_array(out, "U_y", model.y.decoder_weights);
}

BilingualModel read_checkpoint(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw Error("not a checkpoint file (bad magic)");
    }
    const auto version = get_uint<std::uint32_t>(in);
    if (version != kCheckpointVersion) {
        throw Error("unsupported checkpoint version " + std::to_string(version));
    }
    ModelInit init;
    init.dim = get_uint<std::uint32_t>(in);
    const auto h = get_uint<std::uint8_t>(in);
    if (h > 1) {
        throw Error("bad nonlinearity tag in checkpoint");
    }
    init.nonlinearity = h == 0 ? Nonlinearity::tanh : Nonlinearity::identity;
    LanguageHeader lx = get_language(in);
    LanguageHeader ly = get_language(in);
    init.tree_seed_x = lx.tree_seed;
    init.tree_seed_y = ly.tree_seed;
    init.init_range = 0.0;

    BilingualModel model = BilingualModel::create(std::move(lx.vocab), std::move(ly.vocab), init);
    const auto arrays = get_uint<std::uint32_t>(in);
    if (arrays != 7) {
        throw Error("checkpoint holds " + std::to_string(arrays) + " arrays, expected 7");
    }
    get_array(in, "W_x", model.x.embeddings);
    get_array(in, "W_y", model.y.embeddings);
    get_array(in, "c", model.hidden_bias);
    get_array(in, "b_x", model.x.decoder_bias);
    get_array(in, "U_x", model.x.decoder_weights);
    get_array(in, "b_y", model.y.decoder_bias);
    get_array(in, "U_y", model.y.decoder_weights);
    return model;
}

void save_checkpoint(const std::filesystem::path& path, const BilingualModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    write_checkpoint(out, model);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

BilingualModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    return read_checkpoint(in);
}

}  // namespace bowae
