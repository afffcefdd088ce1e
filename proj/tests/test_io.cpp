#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "krg/errors.hpp"
#include "krg/fit.hpp"
#include "krg/run.hpp"
#include "krg/sample_set.hpp"
#include "krg/synth.hpp"
#include "krg/table_io.hpp"

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/krg_io_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

void put(const std::string& path, const std::string& text) {
  krg::write_text_atomic(path, text);
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("a plain table loads locations and responses by header name") {
    TempFile f("basic.tsv");
    put(f.path,
        "x\ty\tw\n"
        "0.5\t1\t10\n"
        "1.5\t2\t20\n"
        "2.5\t3\t30\n"
        "3.5\t4\t40\n");
    auto s = krg::load_table(f.path);
    CHECK(s.dims == 1);
    CHECK(s.count() == 4);
    REQUIRE(s.responses.size() == 2);
    CHECK(s.responses[0].name == "y");
    CHECK(s.responses[1].name == "w");
    CHECK(s.loc(2, 0) == 2.5);
    CHECK(s.responses[1].re[3] == 40.0);
    CHECK(!s.responses[0].is_complex);
    CHECK(!s.complex_locations);
  }

  TEST_CASE("numbered location headers give multivariate samples") {
    TempFile f("multi.csv");
    put(f.path,
        "x1,x2,y\n"
        "0,10,1\n"
        "1,11,2\n"
        "2,12,3\n");
    auto s = krg::load_table(f.path);
    CHECK(s.dims == 2);
    CHECK(s.count() == 3);
    CHECK(s.loc(1, 0) == 1.0);
    CHECK(s.loc(1, 1) == 11.0);
    REQUIRE(s.responses.size() == 1);
    CHECK(s.responses[0].re[2] == 3.0);
  }

  TEST_CASE("complex locations embed as two real axes") {
    TempFile f("cplx.tsv");
    put(f.path,
        "z_re\tz_im\tf_re\tf_im\n"
        "0.1\t-2\t1\t0\n"
        "2.1\t2\t0\t1\n"
        "1.0\t0.5\t0.5\t0.5\n");
    auto s = krg::load_table(f.path);
    CHECK(s.dims == 2);
    CHECK(s.complex_locations);
    CHECK(s.loc(0, 0) == 0.1);
    CHECK(s.loc(0, 1) == -2.0);
    REQUIRE(s.responses.size() == 1);
    CHECK(s.responses[0].name == "f");
    CHECK(s.responses[0].is_complex);
    CHECK(s.responses[0].re[1] == 0.0);
    CHECK(s.responses[0].im[1] == 1.0);
  }

  TEST_CASE("response pairs match by suffix regardless of column order") {
    TempFile f("pair.tsv");
    put(f.path,
        "x\tg_im\tg_re\n"
        "0\t-1\t5\n"
        "1\t-2\t6\n");
    auto s = krg::load_table(f.path);
    REQUIRE(s.responses.size() == 1);
    CHECK(s.responses[0].name == "g");
    CHECK(s.responses[0].is_complex);
    CHECK(s.responses[0].re[0] == 5.0);
    CHECK(s.responses[0].im[0] == -1.0);

    // A suffix without its partner stays an ordinary real column.
    TempFile g("lone.tsv");
    put(g.path,
        "x\ta_re\tb\tc_im\n"
        "0\t1\t2\t3\n"
        "1\t4\t5\t6\n");
    auto t = krg::load_table(g.path);
    REQUIRE(t.responses.size() == 3);
    CHECK(t.responses[0].name == "a_re");
    CHECK(!t.responses[0].is_complex);
    CHECK(t.responses[1].name == "b");
    CHECK(t.responses[2].name == "c_im");
    CHECK(!t.responses[2].is_complex);
  }

  TEST_CASE("whitespace tables with comments and blank lines") {
    TempFile f("spaced.txt");
    put(f.path,
        "# generated for the reader test\n"
        "\n"
        "x y\n"
        "0 1\n"
        "# midway note\n"
        "\n"
        "1 2\n"
        "2 4\n");
    auto s = krg::load_table(f.path);
    CHECK(s.count() == 3);
    CHECK(s.responses[0].re[2] == 4.0);
  }

  TEST_CASE("malformed tables name the offending data row") {
    TempFile f("bad.tsv");

    put(f.path, "x\ty\n0\t1\n1\tnot_a_number\n");
    CHECK_THROWS_WITH_AS(krg::load_table(f.path),
                         doctest::Contains("row 2"), krg::InputError);

    put(f.path, "x\ty\n0\t1\n1\tnan\n");
    CHECK_THROWS_WITH_AS(krg::load_table(f.path),
                         doctest::Contains("non-finite"), krg::InputError);

    put(f.path, "x\ty\n0\t1\n1\n");
    CHECK_THROWS_WITH_AS(krg::load_table(f.path),
                         doctest::Contains("row 2"), krg::InputError);

    put(f.path, "");
    CHECK_THROWS_AS(krg::load_table(f.path), krg::InputError);

    put(f.path, "x\ty\n");
    CHECK_THROWS_WITH_AS(krg::load_table(f.path),
                         doctest::Contains("no data rows"), krg::InputError);

    put(f.path, "u\tv\n0\t1\n");
    CHECK_THROWS_WITH_AS(krg::load_table(f.path),
                         doctest::Contains("location"), krg::InputError);

    CHECK_THROWS_AS(krg::load_table("/tmp/krg_io_does_not_exist.tsv"), krg::InputError);
  }

  TEST_CASE("surface files round trip bit-exactly") {
    auto data = krg::synth_generate("sinc", 120, 3);
    krg::GridOptions gopt;
    gopt.m_override = {32};
    krg::KernelSpec kernel{krg::KernelFamily::epanechnikov, {0.04}};
    krg::FitConfig fcfg;
    fcfg.order = 1;
    auto grid = krg::engine_grid(data.samples, gopt, kernel.family, kernel.h);
    auto surf = krg::fit_single_bandwidth(data.samples, grid, kernel, fcfg);

    auto sf = krg::surface_to_file(surf);
    CHECK(sf.meta.at("kernel") == "epanechnikov");
    CHECK(sf.meta.at("order") == "1");
    CHECK(sf.field("y") >= 0);
    CHECK(sf.field("__solved") >= 0);
    CHECK(sf.field("missing") == -1);

    TempFile f("surface.krg");
    krg::write_surface_file(f.path, sf);
    auto back = krg::load_surface_file(f.path);

    CHECK(back.grid.dims == sf.grid.dims);
    CHECK(back.grid.m == sf.grid.m);
    CHECK(back.grid.padded == sf.grid.padded);
    CHECK(back.grid.fft_len == sf.grid.fft_len);
    CHECK(back.grid.oversample == sf.grid.oversample);
    CHECK(back.grid.pad == sf.grid.pad);
    for (int j = 0; j < sf.grid.dims; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      CHECK(back.grid.lo[ju] == sf.grid.lo[ju]);
      CHECK(back.grid.hi[ju] == sf.grid.hi[ju]);
      CHECK(back.grid.step[ju] == sf.grid.step[ju]);
      CHECK(back.grid.scale[ju] == sf.grid.scale[ju]);
    }
    CHECK(back.meta == sf.meta);
    REQUIRE(back.fields.size() == sf.fields.size());
    for (std::size_t k = 0; k < sf.fields.size(); ++k) {
      CHECK(back.field_names[k] == sf.field_names[k]);
      REQUIRE(back.fields[k].size() == sf.fields[k].size());
      for (std::int64_t i = 0; i < sf.fields[k].size(); ++i)
        CHECK(back.fields[k][i] == sf.fields[k][i]);  // %.17g keeps every bit
    }

    auto restored = krg::surface_from_file(back);
    CHECK(restored.kernel.family == surf.kernel.family);
    CHECK(restored.kernel.h == surf.kernel.h);
    CHECK(restored.order == surf.order);
    CHECK(restored.masked_count == surf.masked_count);
    REQUIRE(restored.values.size() == surf.values.size());
    for (std::int64_t i = 0; i < surf.values[0].size(); ++i) {
      CHECK(restored.values[0][i] == surf.values[0][i]);
      CHECK(restored.solved[i] == surf.solved[i]);
    }

    SUBCASE("corrupt files are refused") {
      put(f.path, "not a surface\n");
      CHECK_THROWS_AS(krg::load_surface_file(f.path), krg::InputError);
      auto text = krg::read_text("/dev/null");
      CHECK(text.empty());
      // Truncation past the magic line still fails cleanly.
      std::string good;
      {
        std::ostringstream os;
        krg::write_surface_file(f.path, sf);
        good = krg::read_text(f.path);
      }
      put(f.path, good.substr(0, good.size() / 2));
      CHECK_THROWS_AS(krg::load_surface_file(f.path), krg::InputError);
    }
  }

  TEST_CASE("the column writer refuses ragged input and is readable back") {
    TempFile f("cols.tsv");
    std::vector<double> a{1.0, 2.0};
    std::vector<double> b{3.0, 4.0};
    krg::write_columns(f.path, {"x", "y"}, {&a, &b});
    auto s = krg::load_table(f.path);
    CHECK(s.count() == 2);
    CHECK(s.responses[0].re[1] == 4.0);

    std::vector<double> ragged{1.0};
    CHECK_THROWS_AS(krg::write_columns(f.path, {"x", "y"}, {&a, &ragged}), krg::InputError);
    CHECK_THROWS_AS(krg::write_columns(f.path, {"x"}, {&a, &b}), krg::InputError);
  }

  TEST_CASE("the sweep report carries both bandwidth scales and the selection flag") {
    auto data = krg::synth_generate("bessel1", 150, 4);
    auto hlist = krg::make_hlist({{true, 0.001, 0.1, 5}});
    krg::GridOptions gopt;
    krg::FitConfig fcfg;
    fcfg.order = 1;
    krg::CvOptions copt;
    copt.np = 6;
    copt.seed = 2;
    auto res = krg::cv_fit(data.samples, gopt, krg::KernelFamily::gaussian, hlist, fcfg, copt);
    REQUIRE(res.report.responses[0].selected >= 0);

    TempFile f("report.tsv");
    krg::write_cv_report(f.path, res.report, res.grid);

    std::ifstream in(f.path);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header ==
          "index\th1\th1_orig\ttrace_ratio\ttrace_std\tdof\tundersmoothed\tmse_y\tgcv_y\t"
          "selected_y");

    int rows = 0, picks = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      int index, under, selected;
      double h1, h1_orig, ratio, rstd, dof, mse, gcv;
      ls >> index >> h1 >> h1_orig >> ratio >> rstd >> dof >> under >> mse >> gcv >> selected;
      REQUIRE(!ls.fail());
      CHECK(index == rows);
      CHECK(h1 == res.report.candidates[static_cast<std::size_t>(rows)].h[0]);
      CHECK(h1_orig == doctest::Approx(h1 * res.grid.scale[0]).epsilon(1e-15));
      CHECK(dof == doctest::Approx(150.0 * (1.0 - ratio)).epsilon(1e-12));
      picks += selected;
      if (selected == 1) CHECK(rows == res.report.responses[0].selected);
      ++rows;
    }
    CHECK(rows == 5);
    CHECK(picks == 1);
  }

  TEST_CASE("run configurations survive the json round trip") {
    krg::RunConfig cfg;
    cfg.y_type = "variance";
    cfg.kernel_type = "triangle";
    cfg.order = 2;
    cfg.ratio = 0.5;
    cfg.m_override = {48, 96};
    cfg.flag_power2 = false;
    cfg.accuracy = 9;
    cfg.nufft_deconv = false;
    cfg.dstd = 1.5;
    cfg.calc_dof = false;
    cfg.np = 33;
    cfg.interp = "linear";
    cfg.extrap = "nearest";
    cfg.compact = false;
    cfg.seed = 1234567;
    cfg.hlist = "linear:0.2:0.9:7";
    cfg.chunk = 17;
    cfg.oversample = 1;

    auto j = krg::config_to_json(cfg);
    auto back = krg::config_from_json(j);
    CHECK(back.y_type == cfg.y_type);
    CHECK(back.kernel_type == cfg.kernel_type);
    CHECK(back.order == cfg.order);
    CHECK(back.ratio == cfg.ratio);
    CHECK(back.m_override == cfg.m_override);
    CHECK(back.flag_power2 == cfg.flag_power2);
    CHECK(back.accuracy == cfg.accuracy);
    CHECK(back.nufft_deconv == cfg.nufft_deconv);
    CHECK(back.dstd == cfg.dstd);
    CHECK(back.calc_dof == cfg.calc_dof);
    CHECK(back.np == cfg.np);
    CHECK(back.interp == cfg.interp);
    CHECK(back.extrap == cfg.extrap);
    CHECK(back.compact == cfg.compact);
    CHECK(back.seed == cfg.seed);
    CHECK(back.hlist == cfg.hlist);
    CHECK(back.chunk == cfg.chunk);
    CHECK(back.oversample == cfg.oversample);
  }

  TEST_CASE("bandwidth rule strings parse or fail loudly") {
    auto rules = krg::parse_hlist("log:0.01:1:10");
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].log);
    CHECK(rules[0].lo == 0.01);
    CHECK(rules[0].hi == 1.0);
    CHECK(rules[0].n == 10);

    auto two = krg::parse_hlist("linear:0.1:0.5:5,log:0.02:2:3");
    REQUIRE(two.size() == 2);
    CHECK(!two[0].log);
    CHECK(two[1].log);
    CHECK(two[1].n == 3);

    CHECK_THROWS_AS(krg::parse_hlist("log:0.01:1"), krg::InputError);
    CHECK_THROWS_AS(krg::parse_hlist("quadratic:0.01:1:5"), krg::InputError);
    CHECK_THROWS_AS(krg::parse_hlist("log:abc:1:5"), krg::InputError);
    CHECK_THROWS_AS(krg::parse_hlist(""), krg::InputError);
  }
}
