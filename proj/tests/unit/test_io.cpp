#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <sstream>

#include "approx.hpp"
#include "decolab/datasets.hpp"
#include "decolab/errors.hpp"
#include "decolab/io.hpp"

using namespace decolab;

namespace {

std::string error_text(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("decolab_test_io_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, std::numeric_limits<double>::max()}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("read_csv") {
    SUBCASE("comments and blank lines are skipped, line numbers kept") {
        std::istringstream in("# header comment\nx,y\n\n1,2\n# mid\n3,4e-3\n");
        const auto t = read_csv(in, "mem");
        REQUIRE(t.rows.size() == 2);
        CHECK(t.lines == std::vector<int>{4, 6});
        CHECK(t.column_values("y") == std::vector<double>{2.0, 4e-3});
        CHECK(t.column("z") == -1);
    }
    SUBCASE("a malformed number names the line") {
        std::istringstream in("x,y\n1,2\n3,4..5\n");
        const auto msg = error_text([&] { read_csv(in, "mem"); });
        CHECK(msg.find("mem:3") != std::string::npos);
    }
    SUBCASE("a ragged row names the line") {
        std::istringstream in("x,y\n1,2,3\n");
        CHECK_THROWS_AS(read_csv(in, "mem"), DataError);
    }
    SUBCASE("words are tolerated until their column is read as numbers") {
        std::istringstream in("kind,y\ncpmg,1\nramsey,2\n");
        const auto t = read_csv(in, "mem");
        CHECK(t.column_values("y") == std::vector<double>{1.0, 2.0});
        const auto msg = error_text([&] { (void)t.column_values("kind"); });
        CHECK(msg.find("mem:2") != std::string::npos);
        CHECK(msg.find("cpmg") != std::string::npos);
    }
    SUBCASE("a missing column is a data error") {
        std::istringstream in("x\n1\n");
        CHECK_THROWS_AS(read_csv(in, "mem").column_values("y"), DataError);
    }
}

TEST_CASE("parse_kv") {
    std::istringstream in("a = 1\n# note\n[dataset]\nfile = x.csv\npower_nW = 5\n");
    const auto sections = parse_kv(in, "mem");
    REQUIRE(sections.size() == 2);
    CHECK(sections[0].name.empty());
    CHECK(sections[1].name == "dataset");
    CHECK(sections[1].line == 3);
    CHECK(sections[1].entries.at(1).line == 5);
    CHECK(kv_number(sections[1].entries.at(1), "mem") == 5.0);
    KvEntry bad{"k", "12x", 7};
    const auto msg = error_text([&] { kv_number(bad, "mem"); });
    CHECK(msg.find("mem:7") != std::string::npos);
}

TEST_CASE("decay curve files") {
    DecayCurve c;
    c.x = {0.5, 1.0, 2.0};
    c.y = {0.9, 0.7, 1.0 / 3.0};
    c.sigma = {0.01, 0.02, 0.03};
    std::stringstream buf;
    write_decay_curve(buf, c);
    const auto back = decay_curve_from_table(read_csv(buf, "mem"));
    CHECK(back.x == c.x);
    CHECK(back.y == c.y);
    CHECK(back.sigma == c.sigma);

    std::istringstream unweighted("x,y\n1,2\n");
    CHECK(decay_curve_from_table(read_csv(unweighted, "mem")).sigma.empty());
}

TEST_CASE("diffusion manifest") {
    const auto dir = scratch_dir("manifest");
    DiffusionDataset d;
    d.power_nw = 15.0;
    d.forward.x = d.backward.x = {1e-4, 2e-4};
    d.forward.y = {0.8, 0.7};
    d.backward.y = {0.85, 0.75};
    d.forward.sigma = d.backward.sigma = {0.01, 0.02};
    {
        std::ofstream f(dir / "b.csv");
        write_diffusion_dataset(f, d);
        std::ofstream a(dir / "a.csv");
        d.power_nw = 5.0;
        write_diffusion_dataset(a, d);
    }
    {
        std::ofstream m(dir / "m.txt");
        m << "gamma_h_MHz = 22\n[dataset]\npower_nW = 15\nfile = b.csv\n[dataset]\npower_nW = 5\nfile = a.csv\n";
    }
    const auto man = load_diffusion_manifest((dir / "m.txt").string());
    REQUIRE(man.gamma_h.has_value());
    CHECK(*man.gamma_h == 22.0);
    REQUIRE(man.datasets.size() == 2);
    CHECK(man.datasets[0].power_nw == 5.0);
    CHECK(man.datasets[1].power_nw == 15.0);
    CHECK(man.datasets[1].forward.y == d.forward.y);
    CHECK(man.datasets[1].backward.x == d.backward.x);
    CHECK(man.datasets[1].backward.sigma == d.forward.sigma);

    {
        std::ofstream m(dir / "bad.txt");
        m << "[dataset]\npower_nW = 5\nfile = a.csv\ncolour = red\n";
    }
    const auto msg = error_text([&] { load_diffusion_manifest((dir / "bad.txt").string()); });
    CHECK(msg.find(":4") != std::string::npos);
    CHECK_THROWS_AS(load_diffusion_manifest((dir / "absent.txt").string()), DataError);
    std::filesystem::remove_all(dir);
}
