#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "wgraph/config.hpp"
#include "wgraph/errors.hpp"
#include "wgraph/report.hpp"

using namespace wg;

TEST(Config, ParsesValuesCommentsAndLists) {
    const Config c = Config::parse("# header\nalpha = 0.5  # trailing\n\neps_list = 0.4, 0.2,0.1\nflag = yes\nn = 3\n");
    EXPECT_DOUBLE_EQ(c.number("alpha", 0.0), 0.5);
    EXPECT_EQ(c.numbers("eps_list", {}), (std::vector<double>{0.4, 0.2, 0.1}));
    EXPECT_TRUE(c.flag("flag", false));
    EXPECT_EQ(c.integer("n", 0), 3);
    EXPECT_EQ(c.integer("missing", 7), 7);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(Config::parse("a = 1\na = 2\n"), DomainError);
    EXPECT_THROW(Config::parse("just text\n"), DomainError);
    EXPECT_THROW(Config::parse("a = 1x").number("a", 0.0), DomainError);
    EXPECT_THROW(Config::parse("a = 1.5").integer("a", 0), DomainError);
    EXPECT_THROW(Config::parse("a = maybe").flag("a", false), DomainError);
    EXPECT_THROW(Config::parse("bogus = 1").check_keys({"alpha"}), DomainError);
    EXPECT_TRUE(Config::parse("alpha_grid = ").numbers("alpha_grid", {1.0}).empty());
}

TEST(Config, HashIsCanonical) {
    const Config a = Config::parse("x = 1\ny = 2\n");
    const Config b = Config::parse("y=2\n  x =1  \n");
    EXPECT_EQ(a.hash(), b.hash());
    Config c = a;
    c.set("x", "1.0");
    EXPECT_NE(a.hash(), c.hash());
}

TEST(Config, BuildsProfiles) {
    const CurvatureProfile p = profile_from_config(Config::parse("profile = bump\namplitude = 2\nhalf_width = 0.5"));
    EXPECT_DOUBLE_EQ(p(0.0), 2.0);
    EXPECT_DOUBLE_EQ(p.s_hi(), 0.5);
    const CurvatureProfile r = profile_from_config(Config::parse("profile = rectangular\ns_lo = -1\ns_hi = 2"));
    EXPECT_EQ(r.kind(), ProfileKind::rectangular);
    EXPECT_THROW(profile_from_config(Config::parse("profile = spiral")), DomainError);
}

TEST(Report, FittedExponentIsLogLogSlope) {
    EXPECT_NEAR(fitted_exponent({0.4, 0.2, 0.1}, {0.16, 0.04, 0.01}), 2.0, 1e-12);
    EXPECT_TRUE(std::isnan(fitted_exponent({0.4}, {0.1})));
}

TEST(Report, JsonAndCsvAreWellFormed) {
    ConvergenceReport r;
    r.study = "unit";
    r.predicted = GraphOperatorSpec::free_line();
    r.alternative = GraphOperatorSpec::decoupled();
    EpsilonRow row;
    row.epsilon = 0.1;
    row.error = 0.01;
    r.rows.push_back(row);
    const nlohmann::json j = to_json(r);
    EXPECT_EQ(j["verdict"], "inconclusive");
    EXPECT_TRUE(j["rows"][0]["leakage"].is_null());
    EXPECT_DOUBLE_EQ(j["rows"][0]["error"].get<double>(), 0.01);
    const std::string csv = to_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "epsilon,h,nodes,error,error_full,error_refined,error_alternative,leakage,transmission_re,"
              "transmission_im,vertex_residual,off_diagonal,solver_residual");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}
