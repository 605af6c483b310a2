#include "kneck/errors.hpp"
#include "kneck/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace kneck;

TEST_SUITE("io")
{
    TEST_CASE("FNV-1a reference values")
    {
        CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
        CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
        CHECK(hex64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
        CHECK(hex64(1) == "0000000000000001");
    }

    TEST_CASE("fixed formatting")
    {
        CHECK(fmt(1.0) == "1.000000000000e+00");
        CHECK(fmt(-0.00125) == "-1.250000000000e-03");
        CHECK(fmt(std::numeric_limits<double>::quiet_NaN()) == "nan");
        CHECK(fmt(-std::numeric_limits<double>::infinity()) == "-inf");
        CHECK(std::stod(fmt(0.1234567890123)) == doctest::Approx(0.1234567890123).epsilon(1e-12));
    }

    TEST_CASE("CSV tables")
    {
        CsvTable t({"a", "b"});
        t.add_comment("tool kneck");
        t.add_row({"1", "2"});
        t.add_row({"x", "y"});
        CHECK(t.str() == "# tool kneck\na,b\n1,2\nx,y\n");
        CHECK_THROWS_AS(t.add_row({"only"}), Error);
    }

    TEST_CASE("SVG plot")
    {
        const std::string svg =
            svg_line_plot({{"f<0", {0.0, 1.0, 2.0}, {1.0, 4.0, 9.0}}, {"g", {0.0, 2.0}, {2.0, std::nan("")}}}, "t & u",
                          "x", "y");
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(svg.find("t &amp; u") != std::string::npos);
        CHECK(svg.find("f&lt;0") != std::string::npos);
        CHECK(svg.find("nan") == std::string::npos);
        std::size_t lines = 0;
        for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1))
            ++lines;
        CHECK(lines == 2);
        // Degenerate ranges still produce a finite plot.
        const std::string flat = svg_line_plot({{"c", {1.0}, {1.0}}}, "c", "x", "y");
        CHECK(flat.find("inf") == std::string::npos);
    }

    TEST_CASE("key=value parsing")
    {
        const auto kv = parse_key_value("# header\nT = 25,50 # trailing\n\n  spectrum=torus:6\n");
        CHECK(kv.size() == 2);
        CHECK(kv.at("T") == "25,50");
        CHECK(kv.at("spectrum") == "torus:6");
        try {
            parse_key_value("a=1\n\nbroken line\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_key_value(" = 3\n"), ConfigError);
    }

    TEST_CASE("real lists")
    {
        const auto v = parse_real_list("25, 50,1e2,");
        REQUIRE(v.size() == 3);
        CHECK(v[0] == 25.0);
        CHECK(v[2] == 100.0);
        CHECK(parse_real_list("").empty());
        CHECK_THROWS_AS(parse_real_list("1,two"), ConfigError);
        CHECK_THROWS_AS(parse_real_list("3x"), ConfigError);
    }

    TEST_CASE("atomic write and read back")
    {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / ("kneck_io_test_" + hex64(fnv1a64(__FILE__)));
        fs::remove_all(dir);
        const std::string path = (dir / "nested" / "out.csv").string();
        atomic_write(path, "first\n");
        atomic_write(path, "second\n");
        CHECK(read_file(path) == "second\n");
        CHECK_FALSE(fs::exists(path + ".tmp"));
        fs::remove_all(dir);
        CHECK_THROWS_AS(read_file(path), ConfigError);
    }
}
