#include "evobank/io.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace evobank::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::IoError, "short write to " + path.string());
}

template <typename T>
void put_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<T>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    }
    return v;
}

CandidatePoint point_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    CandidatePoint p;
    const auto& id = j.at("id");
    if (!id.is_string()) throw std::invalid_argument("\"id\" must be a string");
    p.id = id.get<std::string>();
    const auto& emb = j.at("embedding");
    if (!emb.is_array()) throw std::invalid_argument("\"embedding\" must be an array");
    p.embedding.reserve(emb.size());
    for (const auto& v : emb) {
        if (!v.is_number()) throw std::invalid_argument("\"embedding\" must contain numbers");
        p.embedding.push_back(v.get<double>());
    }
    const auto& q = j.at("quality");
    if (!q.is_number()) throw std::invalid_argument("\"quality\" must be a number");
    p.quality = q.get<double>();
    if (auto it = j.find("source"); it != j.end() && !it->is_null()) p.source = it->get<std::string>();
    if (auto it = j.find("meta"); it != j.end() && !it->is_null()) {
        for (const auto& [k, v] : it->items()) p.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return p;
}

json point_to_json(const CandidatePoint& p) {
    json j;
    j["id"] = p.id;
    j["embedding"] = p.embedding;
    j["quality"] = p.quality;
    if (!p.source.empty()) j["source"] = p.source;
    if (!p.meta.empty()) j["meta"] = p.meta;
    return j;
}

json config_to_json(const EvolutionConfig& c) {
    return json{{"bank_size", c.bank_size},   {"alpha0", c.alpha0},
                {"lambda", c.lambda},         {"beta", c.beta},
                {"gamma", c.gamma},           {"combination", std::string(to_string(c.combination))},
                {"nonlinear_base", std::string(to_string(c.nonlinear_base))},
                {"r_l", c.r_l},               {"r_h", c.r_h},
                {"batch_size", c.batch_size}, {"max_iters", c.max_iters},
                {"stable_iters", c.stable_iters}, {"preference", c.preference},
                {"seed", c.seed}};
}

EvolutionConfig config_from_json(const json& j) {
    EvolutionConfig c;
    c.bank_size = j.at("bank_size").get<std::size_t>();
    c.alpha0 = j.at("alpha0").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.beta = j.at("beta").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.combination = parse_combination(j.at("combination").get<std::string>());
    c.nonlinear_base = parse_combination(j.at("nonlinear_base").get<std::string>());
    c.r_l = j.at("r_l").get<double>();
    c.r_h = j.at("r_h").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.max_iters = j.at("max_iters").get<int>();
    c.stable_iters = j.at("stable_iters").get<int>();
    c.preference = j.at("preference").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

std::string entries_text(const std::vector<BankEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        json j = point_to_json(e.point);
        j["rank"] = e.rank;
        j["s_rep"] = e.s_rep;
        j["s_rep_norm"] = e.s_rep_norm;
        j["s_q_norm"] = e.s_q_norm;
        j["overall"] = e.overall;
        j["round_added"] = e.round_added;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string scores_text(const ScoreVector& scores) {
    std::string out;
    for (const auto& s : scores) {
        json j{{"id", s.id},         {"s_rep", s.s_rep}, {"s_rep_norm", s.s_rep_norm},
               {"s_q", s.s_q},       {"s_q_norm", s.s_q_norm}, {"overall", s.overall}};
        if (s.s_q_mapped) j["s_q_mapped"] = *s.s_q_mapped;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string history_index_text(const HistoryBlocks& h) {
    json j{{"participants", h.participant_ids},
           {"bank_ids", h.bank_ids},
           {"bank_positions", h.bank_positions}};
    return j.dump(1) + "\n";
}

template <typename F>
void for_each_line(std::string_view text, const char* file, F&& fn) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const std::string_view line = text.substr(start, end - start);
        if (!line.empty()) {
            try {
                fn(json::parse(line));
            } catch (const Error&) {
                throw;
            } catch (const std::exception& e) {
                fail(ErrorKind::ParseError, std::string(file) + " line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        start = end + 1;
    }
}

Matrix embeddings_matrix(const std::vector<Embedding>& rows, std::size_t dim) {
    Matrix m(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    return m;
}

}  // namespace

Pool parse_candidates(std::istream& in, std::optional<std::size_t> dimension) {
    std::vector<CandidatePoint> points;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    auto at_line = [&line_no](const std::string& msg) { return "line " + std::to_string(line_no) + ": " + msg; };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        CandidatePoint p;
        try {
            p = point_from_json(json::parse(line));
        } catch (const std::exception& e) {
            fail(ErrorKind::ParseError, at_line(e.what()));
        }
        if (!dimension) dimension = p.embedding.size();
        if (p.embedding.size() != *dimension || p.embedding.empty()) {
            fail(ErrorKind::DimensionMismatch, at_line("embedding has length " + std::to_string(p.embedding.size()) +
                                                       ", expected " + std::to_string(*dimension)));
        }
        for (double v : p.embedding) {
            if (!std::isfinite(v)) fail(ErrorKind::NonFiniteValue, at_line("non-finite embedding value"));
        }
        if (!std::isfinite(p.quality)) fail(ErrorKind::NonFiniteValue, at_line("non-finite quality"));
        if (!seen.insert(p.id).second) fail(ErrorKind::DuplicateId, at_line("duplicate id '" + p.id + "'"));
        points.push_back(std::move(p));
    }
    if (points.empty()) fail(ErrorKind::EmptyPool, "no candidate records found");
    return validate_pool(std::move(points), dimension);
}

Pool ingest_candidates(const fs::path& path, std::optional<std::size_t> dimension) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    try {
        return parse_candidates(in, dimension);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_candidates(std::ostream& out, std::span<const CandidatePoint> points) {
    for (const auto& p : points) out << point_to_json(p).dump() << '\n';
}

void write_candidates(const fs::path& path, std::span<const CandidatePoint> points) {
    std::ostringstream ss;
    write_candidates(ss, points);
    write_file(path, ss.str());
}

std::string encode_block(const Matrix& m) {
    std::string out;
    out.reserve(kBlockHeaderSize + m.values().size() * 4);
    out.append(kBlockMagic, 4);
    put_le<std::uint16_t>(out, kBlockVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
    put_le<std::uint16_t>(out, 0);
    for (double v : m.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    return out;
}

Matrix decode_block(std::string_view bytes) {
    if (bytes.size() < kBlockHeaderSize || std::memcmp(bytes.data(), kBlockMagic, 4) != 0) {
        fail(ErrorKind::CorruptHeader, "matrix block has a bad magic number");
    }
    const auto version = get_le<std::uint16_t>(bytes, 4);
    if (version != kBlockVersion) {
        fail(ErrorKind::VersionUnsupported, "matrix block version " + std::to_string(version) + " is not supported");
    }
    const auto rows = get_le<std::uint32_t>(bytes, 6);
    const auto cols = get_le<std::uint32_t>(bytes, 10);
    const std::uint64_t count = std::uint64_t{rows} * cols;
    if (bytes.size() != kBlockHeaderSize + count * 4) {
        fail(ErrorKind::CorruptHeader, "matrix block size does not match its header");
    }
    Matrix m(rows, cols);
    auto values = m.values();
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, kBlockHeaderSize + 4 * i));
    }
    return m;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        fail(ErrorKind::IoError, "sha256 failed");
    }
    std::ostringstream ss;
    for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return ss.str();
}

namespace {

struct BankFiles {
    std::string entries, scores, index, rows, cols, participants;

    [[nodiscard]] std::string checksum() const {
        return sha256_hex(entries + scores + index + rows + cols + participants);
    }
};

}  // namespace

void save_bank(const BankState& bank, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

    BankFiles files;
    files.entries = entries_text(bank.entries);
    files.scores = scores_text(bank.last_scores);
    files.index = history_index_text(bank.history);
    files.rows = encode_block(bank.history.bank_rows);
    files.cols = encode_block(bank.history.bank_cols);
    files.participants = encode_block(embeddings_matrix(bank.history.participant_embeddings, bank.dimension));

    json manifest{{"format", "evobank"},
                  {"version", kManifestVersion},
                  {"round", bank.round},
                  {"dimension", bank.dimension},
                  {"bank_entries", bank.entries.size()},
                  {"config", config_to_json(bank.config)},
                  {"checksum", "sha256:" + files.checksum()}};

    write_file(dir / kEntriesFile, files.entries);
    write_file(dir / kScoresFile, files.scores);
    write_file(dir / kHistoryIndexFile, files.index);
    write_file(dir / kHistoryRowsFile, files.rows);
    write_file(dir / kHistoryColsFile, files.cols);
    write_file(dir / kParticipantsFile, files.participants);
    write_file(dir / kManifestFile, manifest.dump(2) + "\n");
}

BankState load_bank(const fs::path& dir) {
    if (!fs::exists(dir / kManifestFile)) fail(ErrorKind::IoError, "no bank manifest in " + dir.string());
    json manifest;
    try {
        manifest = json::parse(read_file(dir / kManifestFile));
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, std::string("manifest: ") + e.what());
    }
    if (manifest.value("version", -1) != kManifestVersion) {
        fail(ErrorKind::VersionUnsupported, "bank manifest version is not supported");
    }

    BankFiles files;
    files.entries = read_file(dir / kEntriesFile);
    files.scores = read_file(dir / kScoresFile);
    files.index = read_file(dir / kHistoryIndexFile);
    files.rows = read_file(dir / kHistoryRowsFile);
    files.cols = read_file(dir / kHistoryColsFile);
    files.participants = read_file(dir / kParticipantsFile);

    BankState bank;
    bank.history.bank_rows = decode_block(files.rows);
    bank.history.bank_cols = decode_block(files.cols);
    const Matrix participants = decode_block(files.participants);

    const std::string expected = manifest.value("checksum", std::string());
    if (expected != "sha256:" + files.checksum()) {
        fail(ErrorKind::ChecksumMismatch, "bank directory " + dir.string() + " does not match its manifest checksum");
    }

    try {
        bank.round = manifest.at("round").get<int>();
        bank.dimension = manifest.at("dimension").get<std::size_t>();
        bank.config = config_from_json(manifest.at("config"));

        const json index = json::parse(files.index);
        bank.history.participant_ids = index.at("participants").get<std::vector<std::string>>();
        bank.history.bank_ids = index.at("bank_ids").get<std::vector<std::string>>();
        bank.history.bank_positions = index.at("bank_positions").get<std::vector<std::size_t>>();
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, std::string("manifest or history index: ") + e.what());
    }

    if (participants.rows() != bank.history.participant_ids.size() || participants.cols() != bank.dimension) {
        fail(ErrorKind::CorruptHeader, "participant block shape does not match the history index");
    }
    for (std::size_t i = 0; i < participants.rows(); ++i) {
        auto row = participants.row(i);
        bank.history.participant_embeddings.emplace_back(row.begin(), row.end());
    }

    for_each_line(files.entries, kEntriesFile, [&bank](const json& j) {
        BankEntry e;
        e.point = point_from_json(j);
        e.rank = j.at("rank").get<std::size_t>();
        e.s_rep = j.at("s_rep").get<double>();
        e.s_rep_norm = j.at("s_rep_norm").get<double>();
        e.s_q_norm = j.at("s_q_norm").get<double>();
        e.overall = j.at("overall").get<double>();
        e.round_added = j.at("round_added").get<int>();
        bank.entries.push_back(std::move(e));
    });
    for_each_line(files.scores, kScoresFile, [&bank](const json& j) {
        ScoreRecord s;
        s.id = j.at("id").get<std::string>();
        s.s_rep = j.at("s_rep").get<double>();
        s.s_rep_norm = j.at("s_rep_norm").get<double>();
        s.s_q = j.at("s_q").get<double>();
        s.s_q_norm = j.at("s_q_norm").get<double>();
        if (j.contains("s_q_mapped")) s.s_q_mapped = j.at("s_q_mapped").get<double>();
        s.overall = j.at("overall").get<double>();
        bank.last_scores.push_back(std::move(s));
    });

    check_rank_permutation(bank.entries);
    bank.history.validate(1e-6);
    return bank;
}

DirectoryLock::DirectoryLock(fs::path dir) : path_(std::move(dir) / kLockFile) {
    std::error_code ec;
    fs::create_directories(path_.parent_path(), ec);
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
        if (errno == EEXIST) fail(ErrorKind::LockHeld, "bank directory is locked by another process (" + path_.string() + ")");
        fail(ErrorKind::IoError, "cannot create lock " + path_.string() + ": " + std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(fd_, pid.data(), pid.size());
}

DirectoryLock::~DirectoryLock() {
    if (fd_ >= 0) {
        ::close(fd_);
        std::error_code ec;
        fs::remove(path_, ec);
    }
}

}  // namespace evobank::io
