#include <doctest.h>

#include <random>

#include "escalife/error.hpp"
#include "escalife/health.hpp"

using namespace escalife;
using namespace escalife::health;

TEST_SUITE("health") {
  TEST_CASE("normalisation maxima and clamping") {
    CHECK(normalize(15'330'000.0, LhiVariable::WorkingTime) == 1.0);
    CHECK(normalize(332'150'000.0 / 2, LhiVariable::PassengerLoad) == 0.5);
    CHECK(normalize(19.61, "fixed_loss_residual") == 1.0);
    CHECK(normalize(0.075, "N") == doctest::Approx(0.5));
    CHECK(normalize(66.0, "C") == 1.0);
    CHECK(normalize(0.0, LhiVariable::FaultCount) == 0.0);
    CHECK_THROWS_AS(normalize(-1.0, LhiVariable::FaultCount), Error);
    CHECK_THROWS_AS(normalize(1.0, "vibes"), Error);
  }

  TEST_CASE("LHI weights") {
    LhiInputs n;
    n.working_time = 1.0;
    CHECK(compute_lhi(n) == doctest::Approx(0.2));
    n = {};
    n.exceedance_area = 1.0;
    CHECK(compute_lhi(n) == doctest::Approx(0.3));
    n = {};
    n.fault_count = 1.0;
    CHECK(compute_lhi(n) == doctest::Approx(0.1));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      LhiInputs x{u(rng), u(rng), u(rng), u(rng), u(rng)};
      const double expected = 0.2 * x.working_time + 0.2 * x.passenger_load + 0.2 * x.fixed_loss_residual +
                              0.3 * x.exceedance_area + 0.1 * x.fault_count;
      const double y = compute_lhi(x);
      CHECK(y == doctest::Approx(expected).epsilon(1e-14));
      CHECK(y >= 0.0);
      CHECK(y <= 1.0);
    }
  }

  TEST_CASE("features from normalised values reconstruct raw values") {
    const auto f = quarter_features_from_normalized(3, Quarter{2021, 4}, 23.59, {0.67, 0.28, 0.0, 0.10, 0.06});
    CHECK(f.raw.working_time == doctest::Approx(0.67 * 15'330'000.0));
    CHECK(f.raw.fault_count == doctest::Approx(0.06 * 33.0));
    CHECK(f.lhi == doctest::Approx(0.2 * 0.67 + 0.2 * 0.28 + 0.3 * 0.10 + 0.1 * 0.06));
    CHECK_THROWS_AS(quarter_features_from_normalized(3, Quarter{2021, 4}, 1.0, {1.5, 0, 0, 0, 0}), Error);
  }

  TEST_CASE("log-linear fit recovers a noiseless curve") {
    std::vector<double> t;
    std::vector<double> y;
    for (int i = 0; i < 24; ++i) {
      t.push_back(5.0 + i);
      y.push_back(0.0928 * std::exp(0.0665 * t.back()));
    }
    const auto fit = fit_exponential(t, y);
    CHECK(fit.a == doctest::Approx(0.0928).epsilon(1e-9));
    CHECK(fit.b == doctest::Approx(0.0665).epsilon(1e-9));
    const auto refined = refine_exponential(t, y, {0.1, 0.06});
    CHECK(refined.a == doctest::Approx(0.0928).epsilon(1e-6));
    CHECK(refined.b == doctest::Approx(0.0665).epsilon(1e-6));

    CHECK_THROWS_AS(fit_exponential(std::vector<double>{1, 2}, std::vector<double>{0.1, 0.2}), Error);
    CHECK_THROWS_AS(fit_exponential(std::vector<double>{1, 1, 1}, std::vector<double>{0.1, 0.2, 0.3}), Error);
    CHECK_THROWS_AS(fit_exponential(std::vector<double>{1, 2, 3}, std::vector<double>{0.1, 0.0, 0.3}), Error);
  }

  TEST_CASE("reference model fit with exclusions") {
    std::vector<FitPoint> pts;
    for (int i = 0; i < 10; ++i) {
      const double age = 4.0 + 2.0 * i;
      pts.push_back({i, Quarter{2021, 4}, age, 0.05 * std::exp(0.07 * age)});
    }
    pts[6].lhi *= 3.0;  // outlier
    FitOptions drop_one;
    drop_one.auto_exclude = 1;
    auto m = fit_reference_model(pts, drop_one);
    CHECK(m.excluded == std::vector<int>{6});
    CHECK(m.a == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(m.b == doctest::Approx(0.07).epsilon(1e-9));
    CHECK(m.fitted_on.size() == 9);
    CHECK(m.y_end == doctest::Approx(0.05 * std::exp(0.07 * 35.0)));

    m = fit_reference_model(pts, {.t_end_years = 40.0, .exclude_ids = {6}});
    CHECK(m.excluded == std::vector<int>{6});
    CHECK(m.b == doctest::Approx(0.07).epsilon(1e-9));
    CHECK(m.t_end_years == 40.0);

    CHECK_THROWS_AS(fit_reference_model(std::span(pts).first(3), drop_one), Error);
    std::vector<FitPoint> falling;
    for (int i = 0; i < 5; ++i) falling.push_back({i, Quarter{2021, 4}, 1.0 + i, 0.5 - 0.05 * i});
    CHECK_THROWS_AS(fit_reference_model(falling), Error);
  }

  TEST_CASE("model JSON round trip and validation") {
    auto m = LhiModel::reference();
    CHECK(m.y_end == doctest::Approx(0.0928 * std::exp(0.0665 * 35.0)));
    m.fitted_on.emplace_back(3, Quarter{2021, 4});
    m.excluded = {11, 19};
    const auto back = lhi_model_from_json(to_json(m));
    CHECK(back.a == m.a);
    CHECK(back.y_end == m.y_end);
    CHECK(back.fitted_on == m.fitted_on);
    CHECK(back.excluded == m.excluded);

    auto j = to_json(m);
    j["y_end"] = 0.5;
    CHECK_THROWS_AS(lhi_model_from_json(j), Error);
    j = to_json(m);
    j.erase("a");
    CHECK_THROWS_AS(lhi_model_from_json(j), Error);
    j = to_json(m);
    j["b"] = -0.1;
    CHECK_THROWS_AS(lhi_model_from_json(j), Error);
  }

  TEST_CASE("baseline fixed loss is the median of usable days") {
    const ServiceWindow w;
    std::vector<energy::DailyFeatures> days(4);
    days[0].fixed_loss_wh_min = 20.0;
    days[1].fixed_loss_wh_min = 22.0;
    days[2].fixed_loss_wh_min = 100.0;
    days[2].missing_window_min = 500;  // excluded
    days[3].fixed_loss_wh_min = 30.0;
    CHECK(baseline_fixed_loss(days, w) == 22.0);
    days.pop_back();
    CHECK(baseline_fixed_loss(days, w) == 21.0);
    CHECK_THROWS_AS(baseline_fixed_loss(std::span(days).subspan(2), w), Error);
  }

  TEST_CASE("quarter aggregation extrapolates lifetime totals") {
    EscalatorMeta meta;
    meta.id = 2;
    meta.rise_m = 10.0;
    meta.age_years = 10.0;
    const Date ref = parse_date("2021-10-01");
    const Quarter q{2021, 4};

    std::vector<energy::DailyFeatures> days;
    for (int i = 0; i < 10; ++i) {
      energy::DailyFeatures d;
      d.escalator_id = 2;
      d.service_date = q.first_day() + std::chrono::days{i};
      d.working_min = 1000 + 10 * i;
      d.passengers = 5000.0 + 100.0 * i;
      d.fixed_loss_wh_min = 20.0 + 0.5 * i;
      d.corrective_events = i % 3 == 0 ? 1 : 0;
      days.push_back(d);
    }
    days[9].missing_window_min = 300;  // excluded from totals but its events still count

    std::vector<vibration::AtRecord> at;
    for (int p = 1; p <= kSensorCount; ++p) {
      for (int k = 0; k < 3; ++k) {
        vibration::AtRecord r;
        r.escalator_id = 2;
        r.point_id = p;
        r.at_g = 0.01 * p * (k + 1);
        at.push_back(r);
      }
    }

    const auto agg = aggregate_quarter(meta, q, ref, days, at, std::nullopt, 20.0);

    double wm = 0.0;
    double pax = 0.0;
    double resid = 0.0;
    for (int i = 0; i < 9; ++i) {
      wm += 1000 + 10 * i;
      pax += 5000.0 + 100.0 * i;
      resid += 0.5 * i;
    }
    // First usable day is the reference date, so age there is exactly 10 years.
    const double before_wm = 10.0 * 365.25 * wm / 9.0;
    const double before_pax = 10.0 * 365.25 * pax / 9.0;
    CHECK(agg.cumulative.working_min == doctest::Approx(before_wm + wm).epsilon(1e-12));
    CHECK(agg.cumulative.passengers == doctest::Approx(before_pax + pax).epsilon(1e-12));
    CHECK(agg.features.raw.fixed_loss_residual == doctest::Approx(resid / 9.0));
    CHECK(agg.features.raw.fault_count == 4.0);

    const std::array<int, 8> w{11, 11, 11, 11, 17, 16, 12, 11};
    double n_expected = 0.0;
    for (int p = 1; p <= 8; ++p) n_expected += w[p - 1] / 100.0 * (0.01 * p * 2.0);  // mean of 1, 2, 3 times 0.01 p
    CHECK(agg.features.raw.exceedance_area == doctest::Approx(n_expected).epsilon(1e-12));
    CHECK(agg.features.age_years == doctest::Approx(10.0 + 92.0 / 365.25));

    const CumulativeTotals prior{1000.0, 2000.0};
    const auto next = aggregate_quarter(meta, q, ref, days, at, prior, 20.0);
    CHECK(next.cumulative.working_min == doctest::Approx(1000.0 + wm));

    at.resize(at.size() - 3);  // point 8 missing
    CHECK_THROWS_AS(aggregate_quarter(meta, q, ref, days, at, prior, 20.0), Error);
    AggregationOptions renorm;
    renorm.missing_sensors = vibration::MissingSensorPolicy::Renormalize;
    CHECK_NOTHROW(aggregate_quarter(meta, q, ref, days, at, prior, 20.0, renorm));

    days[0].service_date = parse_date("2021-09-30");
    CHECK_THROWS_AS(aggregate_quarter(meta, q, ref, days, at, prior, 20.0, renorm), Error);
  }
}
