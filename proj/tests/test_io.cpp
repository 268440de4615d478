#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "sdfilter/io.hpp"

using namespace sdfilter;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/sdfilter_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) const {
        std::ofstream out(path);
        out << content;
    }
};

}  // namespace

TEST_CASE("series csv parsing") {
    TempFile f("basic.csv");
    f.write("t,y\n1,0.5\n2,-1.25\n3,3e-2\n");
    const SeriesData data = read_series_csv(f.path);
    REQUIRE(data.y.size() == 3);
    CHECK(data.y[0] == 0.5);
    CHECK(data.y[1] == -1.25);
    CHECK(data.y[2] == 0.03);
    REQUIRE(data.t.has_value());
    CHECK((*data.t)[2] == 3.0);

    TempFile g("no_t.csv");
    g.write("y\n1.5\n2.5\n");
    const SeriesData no_t = read_series_csv(g.path);
    CHECK_FALSE(no_t.t.has_value());
    CHECK(no_t.y.size() == 2);

    TempFile extra("extra_cols.csv");
    extra.write("a,y,b\n9,1.5,x\n8,2.5,z\n");
    CHECK(read_series_csv(extra.path).y.size() == 2);
}

TEST_CASE("series csv hard errors") {
    TempFile f("bad.csv");
    f.write("t,y\n1,hello\n");
    CHECK_THROWS_AS(read_series_csv(f.path), std::invalid_argument);
    f.write("t,value\n1,2\n");
    CHECK_THROWS_AS(read_series_csv(f.path), std::invalid_argument);
    f.write("t,y\n");
    CHECK_THROWS_AS(read_series_csv(f.path), std::invalid_argument);
    f.write("");
    CHECK_THROWS_AS(read_series_csv(f.path), std::invalid_argument);
    f.write("t,y\n1,\n");
    CHECK_THROWS_AS(read_series_csv(f.path), std::invalid_argument);
    CHECK_THROWS_AS(read_series_csv("/tmp/sdfilter_does_not_exist.csv"), io_error);
}

TEST_CASE("doubles survive a format round trip") {
    for (double v : {0.1, -3.25e-17, 2.0 / 3.0, 1e300, 0.0}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("rendered csv headers match the documented contracts") {
    SimResult sim;
    sim.y = {1.0, 2.0};
    CHECK(render_sim_csv(sim).rfind("t,y\n", 0) == 0);
    sim.latent = std::vector<double>{0.5, 0.6};
    CHECK(render_sim_csv(sim).rfind("t,y,latent\n", 0) == 0);

    ConjugateTrace conj;
    CHECK(render_conjugate_trace_csv(conj) == "t,y,mu_pred,mu_filt,tau,n,score,innovation\n");

    RecursionTrace rec;
    CHECK(render_recursion_trace_csv(rec)
          == "t,y,theta,mu,score,scaling,innovation,score_var,loglik,floored\n");

    ExpansionStudy study;
    study.P_grid = {0.1};
    study.errors = {1e-3};
    study.status = {StudyPointStatus::Ok};
    study.fitted_slope = 2.0;
    const std::string csv = render_expansion_study_csv(study);
    CHECK(csv.rfind("P,error\n", 0) == 0);
    CHECK(csv.find("slope=2\n") != std::string::npos);
}

TEST_CASE("simulated csv can be read back bit-exactly") {
    SimResult sim;
    sim.y = {0.123456789012345678, -2.5e-13, 41.0};
    TempFile f("roundtrip.csv");
    write_output(f.path, render_sim_csv(sim));
    const SeriesData data = read_series_csv(f.path);
    REQUIRE(data.y.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(data.y[i] == sim.y[i]);
}
