#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dsglm/link.hpp"
#include "dsglm/rng.hpp"
#include "oracle_helpers.hpp"

using dsglm::LinkSpec;
using oracle::rel_err;

TEST_CASE("logistic cdf values") {
    const LinkSpec lg = LinkSpec::logistic();
    CHECK(dsglm::cdf(lg, 0.0) == 0.5);
    // high-precision complement at z = 10.5; the subtraction 1 - cdf is
    // itself lossy at this magnitude, sf carries full precision
    CHECK(rel_err(1.0 - dsglm::cdf(lg, 10.5), 2.7535691114583470847e-5) < 1e-10);
    CHECK(rel_err(dsglm::sf(lg, 10.5), 2.7535691114583470847e-5) < 1e-13);
    CHECK(dsglm::cdf(lg, -800.0) == 0.0);
    CHECK(dsglm::cdf(lg, 800.0) == 1.0);
    CHECK(dsglm::sf(lg, -800.0) == 1.0);
}

TEST_CASE("logistic derivative values") {
    const LinkSpec lg = LinkSpec::logistic();
    CHECK(dsglm::derivative(lg, 0.0, 1) == 0.25);
    CHECK(dsglm::derivative(lg, 0.0, 2) == 0.0);
    // central finite difference of the cdf at z = 2, step 1e-5
    const double fd =
        (dsglm::cdf(lg, 2.0 + 1e-5) - dsglm::cdf(lg, 2.0 - 1e-5)) / 2e-5;
    CHECK(rel_err(dsglm::derivative(lg, 2.0, 1), fd) < 1e-8);
    CHECK_THROWS_AS(dsglm::derivative(lg, 0.0, 4), dsglm::Error);
    CHECK_THROWS_AS(dsglm::derivative(lg, 0.0, 0), dsglm::Error);
}

TEST_CASE("derivative consistency against finite differences") {
    struct Case {
        LinkSpec link;
        double lo, hi;
    };
    const Case cases[] = {
        {LinkSpec::logistic(), -5.0, 5.0},
        {LinkSpec::gaussian(), -5.0, 5.0},
        {LinkSpec::exponential(), 0.3, 5.0},
        {LinkSpec::pareto(2.5), 1.2, 6.0},
    };
    for (const Case& c : cases) {
        for (int i = 0; i < 20; ++i) {
            const double z = c.lo + (c.hi - c.lo) * i / 19.0;
            const double h = 1e-6 * (1.0 + std::abs(z));
            for (int order = 1; order <= 3; ++order) {
                // FD of the previous derivative; order 1 differentiates
                // -(1 - F), which avoids cancellation against 1.
                double fd;
                if (order == 1) {
                    fd = -(dsglm::sf(c.link, z + h) - dsglm::sf(c.link, z - h)) /
                         (2.0 * h);
                } else {
                    fd = (dsglm::derivative(c.link, z + h, order - 1) -
                          dsglm::derivative(c.link, z - h, order - 1)) /
                         (2.0 * h);
                }
                INFO(dsglm::family_name(c.link.family)
                     << " z=" << z << " order=" << order);
                CHECK(rel_err(dsglm::derivative(c.link, z, order), fd) < 1e-6);
            }
        }
    }
}

TEST_CASE("cdf and derivatives stay finite over |z| <= 700") {
    const LinkSpec families[] = {LinkSpec::logistic(), LinkSpec::gaussian(),
                                 LinkSpec::exponential()};
    for (const LinkSpec& link : families) {
        for (double z = -700.0; z <= 700.0; z += 12.5) {
            CHECK(std::isfinite(dsglm::cdf(link, z)));
            for (int order = 1; order <= 3; ++order) {
                CHECK(std::isfinite(dsglm::derivative(link, z, order)));
            }
        }
    }
    const LinkSpec pareto = LinkSpec::pareto(1.5);
    for (double z = 1.0; z <= 700.0; z += 12.5) {
        CHECK(std::isfinite(dsglm::cdf(pareto, z)));
        for (int order = 1; order <= 3; ++order) {
            CHECK(std::isfinite(dsglm::derivative(pareto, z, order)));
        }
    }
}

TEST_CASE("gaussian log tail and hazard, including the asymptotic branch") {
    const LinkSpec g = LinkSpec::gaussian();
    CHECK(rel_err(dsglm::log_sf(g, 1.5), -2.705944400823889806957) < 1e-13);
    CHECK(rel_err(dsglm::log_sf(g, 8.0), -35.0134371599145498955) < 1e-13);
    CHECK(rel_err(dsglm::log_sf(g, 40.0), -804.6084420137537881666) < 1e-13);
    CHECK(rel_err(dsglm::log_sf(g, 100.0), -5005.524208694205088626) < 1e-13);
    CHECK(rel_err(dsglm::pdf_over_sf(g, 1.5), 1.938677166622543189452) < 1e-12);
    CHECK(rel_err(dsglm::pdf_over_sf(g, 8.0), 8.121368112236112680654) < 1e-12);
    CHECK(rel_err(dsglm::pdf_over_sf(g, 40.0), 40.02496884720726372324) < 1e-12);
}

TEST_CASE("hazard ratios match their defining quotients") {
    struct Case {
        LinkSpec link;
        double lo, hi;
    };
    const Case cases[] = {
        {LinkSpec::logistic(), -4.0, 4.0},
        {LinkSpec::gaussian(), -4.0, 4.0},
        {LinkSpec::exponential(), 0.2, 4.0},
        {LinkSpec::pareto(2.0), 1.1, 5.0},
    };
    for (const Case& c : cases) {
        for (int i = 0; i < 15; ++i) {
            const double z = c.lo + (c.hi - c.lo) * i / 14.0;
            const double f = dsglm::pdf(c.link, z);
            const double F = dsglm::cdf(c.link, z);
            INFO(dsglm::family_name(c.link.family) << " z=" << z);
            CHECK(rel_err(dsglm::pdf_over_sf(c.link, z), f / (1.0 - F)) < 1e-9);
            CHECK(rel_err(dsglm::pdf_over_cdf(c.link, z), f / F) < 1e-9);
            // derivative identities, by finite differences
            const double h = 1e-6 * (1.0 + std::abs(z));
            const double fd_pos = (dsglm::pdf_over_sf(c.link, z + h) -
                                   dsglm::pdf_over_sf(c.link, z - h)) /
                                  (2.0 * h);
            const double fd_neg = (dsglm::pdf_over_cdf(c.link, z + h) -
                                   dsglm::pdf_over_cdf(c.link, z - h)) /
                                  (2.0 * h);
            if (std::abs(fd_pos) > 1e-14) {
                CHECK(rel_err(dsglm::d_pdf_over_sf(c.link, z), fd_pos) < 1e-5);
            }
            CHECK(rel_err(dsglm::d_pdf_over_cdf(c.link, z), fd_neg) < 1e-5);
        }
    }
}

TEST_CASE("downsample transform examples") {
    CHECK(dsglm::downsample_transform(0.5, 1.0) == 0.5);
    CHECK(rel_err(dsglm::downsample_transform(0.5, 0.5), 1.0 / 3.0) < 1e-15);
    CHECK(dsglm::downsample_transform(1.0, 0.37) == 1.0);
    CHECK(dsglm::downsample_transform(0.0, 0.37) == 0.0);
    CHECK(rel_err(dsglm::inverse_transform(1.0 / 3.0, 0.5), 0.5) < 1e-15);
    CHECK(dsglm::inverse_transform(0.0, 0.9) == 0.0);
    CHECK(dsglm::inverse_transform(1.0, 0.9) == 1.0);
    CHECK_THROWS_AS(dsglm::downsample_transform(0.5, 0.0), dsglm::Error);
    CHECK_THROWS_AS(dsglm::downsample_transform(0.5, 1.5), dsglm::Error);
    CHECK_THROWS_AS(dsglm::inverse_transform(0.5, -0.1), dsglm::Error);
}

TEST_CASE("transform bijection over random pairs") {
    dsglm::rng::Stream stream(12345);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double f = stream.next_double();
        const double a = 1e-6 + (1.0 - 1e-6) * stream.next_double();
        const double g = dsglm::downsample_transform(f, a);
        worst = std::max(worst, std::abs(dsglm::inverse_transform(g, a) - f));
        const double g2 = stream.next_double();
        worst = std::max(
            worst,
            std::abs(dsglm::downsample_transform(
                         dsglm::inverse_transform(g2, a), a) -
                     g2));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("G is a CDF in z for fixed alpha") {
    const LinkSpec lg = LinkSpec::logistic();
    const double alpha = 0.3;
    // strictly increasing where doubles can resolve the tail at all
    double prev = -1.0;
    for (double z = -30.0; z <= 30.0; z += 0.25) {
        const double g = dsglm::downsample_transform(dsglm::cdf(lg, z), alpha);
        CHECK(g > prev);
        prev = g;
    }
    CHECK(dsglm::downsample_transform(dsglm::cdf(lg, -40.0), alpha) < 1e-12);
    CHECK(dsglm::downsample_transform(dsglm::cdf(lg, 40.0), alpha) >
          1.0 - 1e-12);
}

TEST_CASE("tail limits") {
    const LinkSpec lg = LinkSpec::logistic();
    CHECK(dsglm::tail_limit(lg, 0.0, 0) == 1.0);
    CHECK(rel_err(dsglm::tail_limit(lg, 0.5, 1), -0.6065306597126334236) <
          1e-14);

    // direct ratio oracle at tau = 20
    const double tau = 20.0;
    for (double u = -2.0; u <= 2.0; u += 0.2) {
        const double ratio =
            (1.0 + std::exp(tau)) / (1.0 + std::exp(tau + u));
        CHECK(std::abs(ratio - dsglm::tail_limit(lg, u, 0)) < 1e-6);
        // first-derivative ratio: -F'(tau+u) / (1 - F(tau))
        const double e1 = std::exp(-(tau + u));
        const double fprime = e1 / ((1.0 + e1) * (1.0 + e1));
        const double sf_tau = std::exp(-tau) / (1.0 + std::exp(-tau));
        CHECK(std::abs(-fprime / sf_tau - dsglm::tail_limit(lg, u, 1)) < 1e-6);
    }

    // scaled families
    const LinkSpec ga = LinkSpec::gaussian();
    CHECK(dsglm::tail_limit(ga, 0.7, 0) == Catch::Approx(std::exp(-0.7)));
    const LinkSpec pa = LinkSpec::pareto(2.0);
    CHECK(rel_err(dsglm::tail_limit(pa, 1.0, 0), 0.25) < 1e-14);
    CHECK(rel_err(dsglm::tail_limit(pa, 1.0, 1), -2.0 * std::pow(2.0, -3.0)) <
          1e-14);
    CHECK_THROWS_AS(dsglm::tail_limit(pa, -1.0, 0), dsglm::Error);

    // exponential family shares the exp(-u) limit
    const LinkSpec ex = LinkSpec::exponential();
    for (double u = -1.0; u <= 3.0; u += 0.5) {
        const double tau_e = 40.0;
        const double ratio = dsglm::sf(ex, tau_e + u) / dsglm::sf(ex, tau_e);
        CHECK(rel_err(ratio, dsglm::tail_limit(ex, u, 0)) < 1e-12);
    }
}

TEST_CASE("scaling per family") {
    CHECK(dsglm::scaling(LinkSpec::logistic(), 12.0) == 1.0);
    CHECK(dsglm::scaling(LinkSpec::exponential(), 3.0) == 1.0);
    CHECK(dsglm::scaling(LinkSpec::gaussian(), 4.0) == 0.25);
    CHECK(dsglm::scaling(LinkSpec::pareto(2.0), 4.0) == 4.0);
    CHECK_THROWS_AS(dsglm::scaling(LinkSpec::gaussian(), 0.0), dsglm::Error);
}

TEST_CASE("pareto support errors") {
    const LinkSpec pa = LinkSpec::pareto(2.0);
    CHECK_THROWS_AS(dsglm::cdf(pa, 0.5), dsglm::Error);
    CHECK_THROWS_AS(dsglm::derivative(pa, 0.0, 1), dsglm::Error);
    CHECK_THROWS_AS(LinkSpec::pareto(1.0), dsglm::Error);
    try {
        dsglm::cdf(pa, 0.5);
        FAIL("expected a domain error");
    } catch (const dsglm::Error& e) {
        CHECK(e.code() == dsglm::ErrorCode::DomainError);
    }
}

TEST_CASE("log-domain primitives agree with direct forms in safe ranges") {
    const LinkSpec families[] = {LinkSpec::logistic(), LinkSpec::gaussian()};
    for (const LinkSpec& link : families) {
        for (double z = -4.0; z <= 4.0; z += 0.5) {
            // |z| <= 4 keeps 1 - cdf itself accurate enough to compare
            CHECK(rel_err(std::exp(dsglm::log_cdf(link, z)),
                          dsglm::cdf(link, z)) < 1e-12);
            CHECK(rel_err(std::exp(dsglm::log_sf(link, z)),
                          1.0 - dsglm::cdf(link, z)) < 1e-10);
        }
    }
}
