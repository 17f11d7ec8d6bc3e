#include <blowup/config.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace blowup;

namespace {

const char* kMinimal = R"([problem]
n = 3
p = 2
alpha = 1

[field]
name = zero
)";

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text, "t.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, MinimalIsFullyDefaulted) {
    const auto c = parse_config_text(kMinimal);
    EXPECT_EQ(c.n, 3);
    EXPECT_EQ(c.p, 2.0);
    EXPECT_EQ(c.j, 0);
    EXPECT_EQ(c.field, "zero");
    EXPECT_EQ(c.sigma_n, 0.5);
    EXPECT_EQ(c.delta, 0.1);
    EXPECT_EQ(c.cfl, 0.5);
    EXPECT_FALSE(c.sweep_mode());
    EXPECT_TRUE(c.wants("csv"));
    EXPECT_FALSE(c.wants("png"));
    const auto s = c.spec();
    EXPECT_EQ(s.m(), 1);
    EXPECT_EQ(s.field.name, "zero");
    EXPECT_EQ(c.solver_mode(), SolverMode::transformed_u);
    EXPECT_EQ(c.criterion_window(), Window::theorem);
}

TEST(Config, SigmaOutOfRangeNamesInterval) {
    const auto msg = error_of(std::string(kMinimal) + "[region]\nsigma_n = 1.5\n");
    EXPECT_NE(msg.find("t.ini:9"), std::string::npos) << msg;
    EXPECT_NE(msg.find("region.sigma_n"), std::string::npos);
    EXPECT_NE(msg.find("(0,1)"), std::string::npos);
}

TEST(Config, EpsListSelectsSweep) {
    const auto c = parse_config_text(R"([problem]
p = 2
eps_list = 1, 0.1, 0.01
[field]
name = zero
)");
    EXPECT_TRUE(c.sweep_mode());
    ASSERT_EQ(c.eps_list.size(), 3u);
    EXPECT_EQ(c.eps_list[2], 0.01);
    EXPECT_EQ(c.spec().eps, 1.0);
}

TEST(Config, SchemaViolations) {
    EXPECT_NE(error_of(std::string(kMinimal) + "colour = red\n").find("unknown key"), std::string::npos);
    EXPECT_NE(error_of("[mystery]\n").find("unknown section"), std::string::npos);
    EXPECT_NE(error_of("p = 2\n").find("outside of any section"), std::string::npos);
    EXPECT_NE(error_of("[problem]\np = 2\np = 3\n").find("duplicate key (first set on line 2)"), std::string::npos);
    EXPECT_NE(error_of("[problem]\np = two\n").find("expected a number"), std::string::npos);
    EXPECT_NE(error_of("[problem]\np = 1\n").find("t.ini:2: key 'problem.p'"), std::string::npos);
    EXPECT_NE(error_of("[problem]\nn = 1\n").find("problem.n"), std::string::npos);
    EXPECT_NE(error_of("[region]\ndelta = 0\n").find("delta"), std::string::npos);
    EXPECT_NE(error_of("[solver]\nmode = sideways\n").find("not one of"), std::string::npos);
    EXPECT_NE(error_of("[field]\nname = bounded_U\nparams = 0.5\n").find("field.params"), std::string::npos);
    EXPECT_THROW(parse_config("/nonexistent/x.ini"), ConfigError);
}

TEST(Config, ManifestRoundTrip) {
    auto c = parse_config_text(R"([problem]
n = 3
p = 2.5
j = 1
alpha = 0.3
eps_list = 1, 0.31622776601683794, 0.1
[field]
name = scale_invariant
params = 2, 0.5
[region]
sigma_n = 0.7
window = main_theorem
[solver]
dr = 0.125
r_obs = 64
[output]
formats = csv
)");
    std::ostringstream a;
    write_manifest(c, a, {"note: one"});
    const auto back = parse_config_text(a.str());
    std::ostringstream b;
    write_manifest(back, b, {"note: one"});
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(back.eps_list, c.eps_list);
    EXPECT_EQ(back.params, c.params);
    EXPECT_EQ(back.window, "main_theorem");
    EXPECT_EQ(back.r_obs, 64.0);
    EXPECT_NE(a.str().find("# note: one"), std::string::npos);
}

TEST(Config, TabulatedField) {
    const auto c = parse_config_text(R"([field]
name = tabulated
t_nodes = 0, 1, 2
a0_values = 1, 0.5, 0.25
r_nodes = 0, 1, 2, 3
u_values = 0, 0.1, 0.2, 0.3
)");
    EXPECT_TRUE(c.spec().field.tabulated);
    std::ostringstream a;
    write_manifest(c, a);
    EXPECT_EQ(parse_config_text(a.str()).u_values, c.u_values);
}
