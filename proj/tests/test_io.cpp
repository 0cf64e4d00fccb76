#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "evobank/io.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

using namespace evobank;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("evobank_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
    return out;
}

BankState sample_bank() {
    EvolutionConfig cfg;
    cfg.bank_size = 8;
    cfg.batch_size = 100;
    auto bank = init_bank(validate_pool(fixtures::gaussian_mixture(1, 30, 4)), cfg);
    fixtures::MixtureOptions opt;
    opt.prefix = "n";
    return evolve_round(bank, validate_pool(fixtures::gaussian_mixture(2, 20, 4, opt)));
}

Pool parse(const std::string& text) {
    std::istringstream in(text);
    return io::parse_candidates(in);
}

}  // namespace

TEST_CASE("candidate ingestion", "[io]") {
    auto pool = parse(R"({"id":"a","embedding":[1,2],"quality":3.5}
{"id":"b","embedding":[0,1],"quality":1,"source":"web"}

{"id":"c","embedding":[4,4],"quality":2,"meta":{"k":1}}
)");
    REQUIRE(pool.size() == 3);
    CHECK(pool[1].source == "web");
    CHECK(pool[0].quality == 3.5);

    try {
        parse("{\"id\":\"a\",\"embedding\":[1,2],\"quality\":1}\n{\"id\":\"b\",\"embedding\":[1],\"quality\":1}\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK(kind_of([] { parse(""); }) == ErrorKind::EmptyPool);
    CHECK(kind_of([] { parse("{\"id\":\"a\",\"embedding\":[1,2]"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse("{\"id\":\"a\",\"embedding\":[1,2]}"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { io::ingest_candidates("/nonexistent/file.jsonl"); }) == ErrorKind::IoError);
}

TEST_CASE("candidate write and read back", "[io]") {
    auto pts = fixtures::gaussian_mixture(3, 10, 3);
    std::ostringstream out;
    io::write_candidates(out, pts);
    auto back = parse(out.str());
    REQUIRE(back.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(back[i].id == pts[i].id);
        CHECK(back[i].embedding == pts[i].embedding);
        CHECK(back[i].quality == pts[i].quality);
    }
}

TEST_CASE("matrix blocks", "[io]") {
    Matrix m(2, 3);
    for (std::size_t i = 0; i < 6; ++i) m.values()[i] = 0.5 * static_cast<double>(i) - 1.0;
    auto bytes = io::encode_block(m);
    REQUIRE(bytes.size() == 16 + 6 * 4);
    CHECK(bytes.substr(0, 4) == "PIBE");
    CHECK(bytes[4] == 1);
    CHECK(bytes[6] == 2);
    CHECK(bytes[10] == 3);
    CHECK(io::decode_block(bytes) == m);

    auto bad = bytes;
    bad.replace(0, 4, "XXXX");
    CHECK(kind_of([&] { io::decode_block(bad); }) == ErrorKind::CorruptHeader);
    auto v2 = bytes;
    v2[4] = 2;
    CHECK(kind_of([&] { io::decode_block(v2); }) == ErrorKind::VersionUnsupported);
    CHECK(kind_of([&] { io::decode_block(bytes.substr(0, 20)); }) == ErrorKind::CorruptHeader);
}

TEST_CASE("sha256", "[io]") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("bank save and load", "[io]") {
    TempDir a, b;
    auto bank = sample_bank();
    io::save_bank(bank, a.path);
    auto loaded = io::load_bank(a.path);
    CHECK(loaded.round == bank.round);
    CHECK(loaded.entries.size() == bank.entries.size());
    CHECK(loaded.config.bank_size == 8);
    CHECK(loaded.last_scores == bank.last_scores);
    CHECK(max_abs_diff(loaded.history.bank_rows, bank.history.bank_rows) < 1e-5 * (1 + bank.history.bank_rows.rows()));
    for (std::size_t i = 0; i < bank.entries.size(); ++i) {
        CHECK(loaded.entries[i].point.id == bank.entries[i].point.id);
        CHECK(loaded.entries[i].overall == bank.entries[i].overall);
        CHECK(loaded.entries[i].round_added == bank.entries[i].round_added);
    }

    io::save_bank(loaded, b.path);
    CHECK(snapshot(a.path) == snapshot(b.path));
    auto twice = io::load_bank(b.path);
    TempDir c;
    io::save_bank(twice, c.path);
    CHECK(snapshot(b.path) == snapshot(c.path));
}

TEST_CASE("bank load detects damage", "[io]") {
    TempDir dir;
    io::save_bank(sample_bank(), dir.path);

    {
        std::ofstream out(dir.path / io::kEntriesFile, std::ios::app);
        out << " ";
    }
    CHECK(kind_of([&] { io::load_bank(dir.path); }) == ErrorKind::ChecksumMismatch);

    io::save_bank(sample_bank(), dir.path);
    auto rows = slurp(dir.path / io::kHistoryRowsFile);
    rows.replace(0, 4, "XXXX");
    std::ofstream(dir.path / io::kHistoryRowsFile, std::ios::binary) << rows;
    CHECK(kind_of([&] { io::load_bank(dir.path); }) == ErrorKind::CorruptHeader);

    CHECK(kind_of([] { io::load_bank("/nonexistent/bank"); }) == ErrorKind::IoError);
}

TEST_CASE("directory lock", "[io]") {
    TempDir dir;
    {
        io::DirectoryLock lock(dir.path);
        CHECK(fs::exists(dir.path / io::kLockFile));
        CHECK(kind_of([&] { io::DirectoryLock second(dir.path); }) == ErrorKind::LockHeld);
    }
    CHECK_FALSE(fs::exists(dir.path / io::kLockFile));
    CHECK_NOTHROW(io::DirectoryLock(dir.path));
}
