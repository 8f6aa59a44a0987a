#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "dnastore/util.hpp"

using namespace dnastore;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "dnastore_cli_out.txt";
    const std::string cmd =
        std::string(DNASTORE_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return {WEXITSTATUS(status), text};
}

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "dnastore_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_fixture(const std::string& name, std::size_t bytes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> data(bytes);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng() & 0xFF);
    const fs::path path = work_dir() / name;
    atomic_write_file(path, data.data(), data.size());
    return path;
}

}  // namespace

TEST_CASE("version prints format versions") {
    const auto r = run("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("manifest_format_version = 1") != std::string::npos);
    CHECK(r.output.find("model_format_version = 1") != std::string::npos);
}

TEST_CASE("encode then decode round trips a fixture byte for byte") {
    const auto input = write_fixture("roundtrip.bin", 48 * 32 + 123, 1);
    const fs::path pkg = work_dir() / "pkg_roundtrip";
    const fs::path restored = work_dir() / "restored.bin";

    const auto enc = run("encode --input " + input.string() + " --output " + pkg.string() +
                         " --mode identity");
    REQUIRE(enc.exit_code == 0);
    CHECK(enc.output.find("blocks = 2") != std::string::npos);

    const auto dec = run("decode --input " + pkg.string() + " --output " + restored.string());
    REQUIRE(dec.exit_code == 0);
    CHECK(read_file_bytes(input) == read_file_bytes(restored));
}

TEST_CASE("a full block yields exactly 32 records") {
    const auto input = write_fixture("block.bin", 48 * 32, 2);
    const fs::path pkg = work_dir() / "pkg_block";
    const auto enc = run("encode --input " + input.string() + " --output " + pkg.string());
    REQUIRE(enc.exit_code == 0);
    const auto fasta = read_file_bytes(pkg / "sequences.fasta");
    const std::string text(fasta.begin(), fasta.end());
    std::size_t records = 0;
    for (char c : text)
        if (c == '>') ++records;
    CHECK(records == 32);
}

TEST_CASE("missing model in learned mode exits with usage error") {
    const auto input = write_fixture("learned.bin", 100, 3);
    const auto r = run("encode --input " + input.string() + " --output " +
                       (work_dir() / "pkg_learned").string() + " --mode learned");
    CHECK(r.exit_code == 2);
}

TEST_CASE("corrupted fasta character exits with format error") {
    const auto input = write_fixture("corrupt.bin", 500, 4);
    const fs::path pkg = work_dir() / "pkg_corrupt";
    REQUIRE(run("encode --input " + input.string() + " --output " + pkg.string()).exit_code == 0);
    // Replace one base with an invalid character.
    auto fasta = read_file_bytes(pkg / "sequences.fasta");
    std::string text(fasta.begin(), fasta.end());
    const auto pos = text.find('\n', text.find('>')) + 5;
    text[pos] = 'U';
    atomic_write_file(pkg / "sequences.fasta", text);
    const auto r = run("decode --input " + pkg.string() + " --output " +
                       (work_dir() / "never.bin").string());
    CHECK(r.exit_code == 6);
}

TEST_CASE("beyond-capacity corruption exits with the uncorrectable code") {
    const auto input = write_fixture("heavy.bin", 48 * 32, 5);
    const fs::path pkg = work_dir() / "pkg_heavy";
    REQUIRE(run("encode --input " + input.string() + " --output " + pkg.string()).exit_code == 0);
    auto fasta = read_file_bytes(pkg / "sequences.fasta");
    std::string text(fasta.begin(), fasta.end());
    // Corrupt the first base of 9 different 4-nt byte groups in record 0.
    std::size_t line_start = text.find('\n', text.find('>')) + 1;
    for (std::size_t byte = 0; byte < 9; ++byte) {
        const std::size_t pos = line_start + byte * 4;
        text[pos] = text[pos] == 'A' ? 'C' : 'A';
    }
    atomic_write_file(pkg / "sequences.fasta", text);
    const auto r = run("decode --input " + pkg.string() + " --output " +
                       (work_dir() / "best_effort.bin").string());
    CHECK(r.exit_code == 5);
    CHECK(r.output.find("failed_rows = b0_r0") != std::string::npos);
}

TEST_CASE("decode is byte identical across runs") {
    const auto input = write_fixture("idem.bin", 2000, 6);
    const fs::path pkg = work_dir() / "pkg_idem";
    REQUIRE(run("encode --input " + input.string() + " --output " + pkg.string()).exit_code == 0);
    const fs::path out1 = work_dir() / "idem1.bin";
    const fs::path out2 = work_dir() / "idem2.bin";
    REQUIRE(run("decode --input " + pkg.string() + " --output " + out1.string()).exit_code == 0);
    REQUIRE(run("decode --input " + pkg.string() + " --output " + out2.string()).exit_code == 0);
    CHECK(read_file_bytes(out1) == read_file_bytes(out2));

    // Re-encoding writes byte-identical package files.
    const fs::path pkg2 = work_dir() / "pkg_idem2";
    REQUIRE(run("encode --input " + input.string() + " --output " + pkg2.string()).exit_code == 0);
    CHECK(read_file_bytes(pkg / "manifest.txt") == read_file_bytes(pkg2 / "manifest.txt"));
    CHECK(read_file_bytes(pkg / "sequences.fasta") == read_file_bytes(pkg2 / "sequences.fasta"));
}

TEST_CASE("analyze reports metrics and rejects unknown metric names") {
    const auto input = write_fixture("analyze.bin", 1000, 7);
    const fs::path pkg = work_dir() / "pkg_analyze";
    REQUIRE(run("encode --input " + input.string() + " --output " + pkg.string()).exit_code == 0);

    const auto ok = run("analyze --input " + (pkg / "sequences.fasta").string() +
                        " --metrics gc,homopolymer --window 16");
    REQUIRE(ok.exit_code == 0);
    CHECK(ok.output.find("gc_mean_percent = ") != std::string::npos);
    CHECK(ok.output.find("homopolymer_max_nt = ") != std::string::npos);
    CHECK(ok.output.find("net_information_density_bits_per_nt = ") != std::string::npos);

    const auto bad = run("analyze --input " + (pkg / "sequences.fasta").string() +
                         " --metrics gc,nonsense");
    CHECK(bad.exit_code == 2);

    atomic_write_file(work_dir() / "empty.fasta", std::string{});
    const auto empty = run("analyze --input " + (work_dir() / "empty.fasta").string());
    CHECK(empty.exit_code == 6);
}

TEST_CASE("train writes a model and a loss trace deterministically") {
    const auto corpus = write_fixture("corpus.bin", 48 * 32, 8);
    const fs::path cfg = work_dir() / "train.cfg";
    atomic_write_file(cfg, std::string("model.tokens_in = 8\n"
                                       "model.hidden_dim = 8\n"
                                       "model.tokens_out = 6\n"
                                       "model.heads = 2\n"
                                       "model.layers = 1\n"
                                       "model.ffn_dim = 16\n"
                                       "model.seed = 3\n"
                                       "rs.n = 8\n"
                                       "rs.k = 6\n"
                                       "pipeline.mask = 7\n"
                                       "train.epochs = 2\n"
                                       "train.batch_size = 16\n"
                                       "train.learning_rate = 0.002\n"
                                       "train.optimizer = adam\n"
                                       "train.seed = 5\n"
                                       "loss.alpha = 0\n"));
    const fs::path model1 = work_dir() / "m1.dsm";
    const fs::path model2 = work_dir() / "m2.dsm";
    const auto r1 = run("train --corpus " + corpus.string() + " --out-model " + model1.string() +
                        " --config " + cfg.string());
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.output.find("final_loss = ") != std::string::npos);
    const auto r2 = run("train --corpus " + corpus.string() + " --out-model " + model2.string() +
                        " --config " + cfg.string());
    REQUIRE(r2.exit_code == 0);
    CHECK(read_file_bytes(model1) == read_file_bytes(model2));
    CHECK(fs::exists(work_dir() / "m1.dsm.loss.txt"));

    // Zero-epoch training equals the initialization.
    const fs::path cfg0 = work_dir() / "train0.cfg";
    auto text = std::string("model.tokens_in = 8\nmodel.hidden_dim = 8\nmodel.tokens_out = 6\n"
                            "model.heads = 2\nmodel.layers = 1\nmodel.ffn_dim = 16\n"
                            "model.seed = 3\nrs.n = 8\nrs.k = 6\npipeline.mask = 7\n"
                            "train.epochs = 0\nloss.alpha = 0\n");
    atomic_write_file(cfg0, text);
    const fs::path model0 = work_dir() / "m0.dsm";
    REQUIRE(run("train --corpus " + corpus.string() + " --out-model " + model0.string() +
                " --config " + cfg0.string())
                .exit_code == 0);
}

TEST_CASE("unknown config keys are rejected by name") {
    const auto input = write_fixture("cfgkey.bin", 100, 9);
    const fs::path cfg = work_dir() / "bad.cfg";
    atomic_write_file(cfg, std::string("no.such.key = 1\n"));
    const auto r = run("encode --input " + input.string() + " --output " +
                       (work_dir() / "pkg_cfgkey").string() + " --config " + cfg.string());
    CHECK(r.exit_code == 6);
    CHECK(r.output.find("no.such.key") != std::string::npos);
}

TEST_CASE("simulate reports one row per rate and reproduces with a seed") {
    const auto input = write_fixture("simulate.bin", 3000, 10);
    const auto r = run("simulate --input " + input.string() + " --sweep 0,0.01,0.02 --seed 9");
    REQUIRE(r.exit_code == 0);
    std::size_t lines = 0;
    for (char c : r.output)
        if (c == '\n') ++lines;
    CHECK(lines == 4);  // header + 3 rates
    CHECK(r.output.find("0.000000 1.000000 0.000000 0") != std::string::npos);

    const auto again = run("simulate --input " + input.string() + " --sweep 0,0.01,0.02 --seed 9");
    CHECK(again.output == r.output);

    const auto bad = run("simulate --input " + input.string() + " --error-rate 1.5");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("io failures exit with the io code") {
    const auto r = run("encode --input /nonexistent/file.bin --output " +
                       (work_dir() / "pkg_io").string());
    CHECK(r.exit_code == 3);
}
