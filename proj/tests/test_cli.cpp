#include <catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "evobank/io.hpp"
#include "fixtures.hpp"

using namespace evobank;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run cli(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + (env.empty() ? "" : " ") + EVOBANK_CLI + std::string(" ") + args + " 2>&1";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

int code_of(ErrorKind k) { return 10 + static_cast<int>(k); }

struct Workspace {
    fs::path root;
    Workspace() {
        root = fs::temp_directory_path() / ("evobank_cli_" + std::to_string(::getpid()));
        fs::remove_all(root);
        fs::create_directories(root);
        fixtures::MixtureOptions opt;
        opt.clusters = 5;
        for (int part = 0; part < 5; ++part) {
            opt.prefix = "s" + std::to_string(part) + "_";
            auto pts = fixtures::gaussian_mixture(100 + static_cast<std::uint64_t>(part), 60, 4, opt);
            io::write_candidates(file(part), pts);
        }
    }
    ~Workspace() { fs::remove_all(root); }
    [[nodiscard]] std::string file(int part) const { return (root / ("part" + std::to_string(part) + ".jsonl")).string(); }
    [[nodiscard]] std::string bank() const { return (root / "bank").string(); }
};

}  // namespace

TEST_CASE("full pipeline through the command line", "[cli]") {
    Workspace ws;
    auto r = cli("init --candidates " + ws.file(0) + " --bank-dir " + ws.bank() + " --bank-size 20 --batch-size 50");
    INFO(r.out);
    REQUIRE(r.code == 0);
    for (int part = 1; part <= 4; ++part) {
        r = cli("evolve --new " + ws.file(part), "EVOBANK_DIR=" + ws.bank());
        INFO(r.out);
        REQUIRE(r.code == 0);
    }
    auto bank = io::load_bank(ws.bank());
    CHECK(bank.round == 4);
    CHECK(bank.size() == 20);

    r = cli("rank --bank-dir " + ws.bank() + " --format csv");
    REQUIRE(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 21);

    const auto subset = (ws.root / "top.jsonl").string();
    r = cli("extract --bank-dir " + ws.bank() + " --budget 7 --out " + subset);
    REQUIRE(r.code == 0);
    CHECK(io::ingest_candidates(subset).size() == 7);

    r = cli("--json stats --subset " + subset);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"size\":7") != std::string::npos);

    r = cli("--json correlate --bank-dir " + ws.bank());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("sp_diversity") != std::string::npos);

    r = cli("extract --bank-dir " + ws.bank() + " --budget 21 --out " + subset);
    CHECK(r.code == code_of(ErrorKind::BudgetExceedsBank));
    CHECK(r.out.find("error: BudgetExceedsBank") != std::string::npos);
}

TEST_CASE("the same arrivals cannot be evolved twice", "[cli]") {
    Workspace ws;
    REQUIRE(cli("--quiet init --candidates " + ws.file(0) + " --bank-dir " + ws.bank() +
                " --bank-size 10 --batch-size 200 --gamma 0")
                .code == 0);
    // widely spread arrivals, so that some of them displace bank members
    const auto spread = (ws.root / "spread.jsonl").string();
    io::write_candidates(spread, fixtures::uniform_pool(7, 30, 4, 60.0, "w"));
    REQUIRE(cli("--quiet evolve --bank-dir " + ws.bank() + " --new " + spread).code == 0);
    auto bank = io::load_bank(ws.bank());
    bool has_new = false;
    for (const auto& e : bank.entries) has_new = has_new || e.round_added == 1;
    REQUIRE(has_new);
    auto r = cli("evolve --bank-dir " + ws.bank() + " --new " + spread);
    CHECK(r.code == code_of(ErrorKind::DuplicateId));
}

TEST_CASE("baselines, overlap and lock handling", "[cli]") {
    Workspace ws;
    const auto a = (ws.root / "a.jsonl").string();
    const auto b = (ws.root / "b.jsonl").string();
    for (const char* method : {"random", "knn1", "kcenter", "deita", "dg", "qg"}) {
        auto r = cli("--quiet select-baseline --method " + std::string(method) + " --candidates " + ws.file(0) +
                     " --size 12 --seed 3 --out " + a);
        INFO(method << ": " << r.out);
        CHECK(r.code == 0);
        const auto written = io::ingest_candidates(a).size();
        if (std::string(method) == "deita") {
            CHECK(written <= 12);
        } else {
            CHECK(written == 12);
        }
    }
    REQUIRE(cli("--quiet select-baseline --method qg --candidates " + ws.file(0) + " --size 12 --out " + a).code == 0);
    REQUIRE(cli("--quiet select-baseline --method qg --candidates " + ws.file(0) + " --size 6 --out " + b).code == 0);
    auto r = cli("--json compare --a " + a + " --b " + b);
    CHECK(r.out.find("\"overlap\":6") != std::string::npos);

    fs::create_directories(ws.bank());
    std::ofstream(fs::path(ws.bank()) / io::kLockFile) << "1\n";
    r = cli("init --candidates " + ws.file(0) + " --bank-dir " + ws.bank() + " --bank-size 10 --batch-size 50");
    CHECK(r.code == code_of(ErrorKind::LockHeld));

    r = cli("rank", "env -u EVOBANK_DIR");
    CHECK(r.code == code_of(ErrorKind::InvalidConfig));
    r = cli("init --candidates " + ws.file(0) + " --bank-dir " + ws.bank() + "x --combination bogus");
    CHECK(r.code == code_of(ErrorKind::InvalidConfig));
    r = cli("frobnicate");
    CHECK(r.code == 2);
}

TEST_CASE("repeated runs give identical bank directories", "[cli]") {
    Workspace ws;
    auto build = [&](const std::string& dir) {
        REQUIRE(cli("--quiet init --candidates " + ws.file(0) + " --bank-dir " + dir + " --bank-size 15 --batch-size 60")
                    .code == 0);
        REQUIRE(cli("--quiet evolve --bank-dir " + dir + " --new " + ws.file(1)).code == 0);
    };
    const auto d1 = (ws.root / "b1").string();
    const auto d2 = (ws.root / "b2").string();
    build(d1);
    build(d2);
    for (const auto& e : fs::directory_iterator(d1)) {
        std::ifstream x(e.path(), std::ios::binary), y(fs::path(d2) / e.path().filename(), std::ios::binary);
        std::stringstream sx, sy;
        sx << x.rdbuf();
        sy << y.rdbuf();
        INFO(e.path().filename());
        CHECK(sx.str() == sy.str());
    }
}
