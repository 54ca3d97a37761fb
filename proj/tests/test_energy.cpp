#include <doctest.h>

#include <algorithm>
#include <random>

#include "escalife/energy.hpp"
#include "escalife/error.hpp"

using namespace escalife;
using namespace escalife::energy;

namespace {

EscalatorMeta meta_of(Direction dir, double rise = 10.0) {
  EscalatorMeta m;
  m.id = 1;
  m.rise_m = rise;
  m.direction = dir;
  m.age_years = 10.0;
  return m;
}

ServiceDayProfile flat_day(double wh) {
  ServiceDayProfile p;
  p.escalator_id = 1;
  p.service_date = parse_date("2021-10-04");
  p.e_total_wh.fill(wh);
  return p;
}

}  // namespace

TEST_SUITE("energy") {
  TEST_CASE("lower percentile picks sorted[floor(q (n - 1))]") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> v(1 + rng() % 500);
      for (auto& x : v) x = u(rng);
      auto sorted = v;
      std::sort(sorted.begin(), sorted.end());
      for (double q : {0.0, 0.05, 0.5, 0.95, 1.0}) {
        const auto k = static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1));
        CHECK(lower_percentile(v, q) == sorted[k]);
      }
    }
    CHECK_THROWS_AS(lower_percentile({}, 0.5), Error);
  }

  TEST_CASE("fixed loss is P5 upward and P95 downward over working minutes") {
    const ServiceWindow w;
    auto p = flat_day(0.0);
    // 1140 in-window minutes valued 10..1149; out-of-window minutes stay high.
    for (int s = 0; s < kMinutesPerDay; ++s) p.e_total_wh[static_cast<std::size_t>(s)] = 5000.0;
    for (int s = w.first_slot(); s < w.end_slot(); ++s) {
      p.e_total_wh[static_cast<std::size_t>(s)] = 10.0 + (s - w.first_slot());
    }
    CHECK(estimate_fixed_loss(p, w, Direction::Up) == 10.0 + std::floor(0.05 * 1139));
    CHECK(estimate_fixed_loss(p, w, Direction::BiDirectional) == 10.0 + std::floor(0.05 * 1139));
    CHECK(estimate_fixed_loss(p, w, Direction::Down) == 10.0 + std::floor(0.95 * 1139));

    // Shutdown minutes are not working minutes.
    p.e_total_wh[static_cast<std::size_t>(w.first_slot())] = 1.0;
    CHECK(working_minutes(p, w) == 1139);

    CHECK_THROWS_AS(estimate_fixed_loss(flat_day(2.0), w, Direction::Up), Error);
  }

  TEST_CASE("variable loss sums clamped deviations from the fixed loss") {
    const ServiceWindow w;
    auto p = flat_day(30.0);
    p.e_total_wh[200] = 50.0;
    p.e_total_wh[300] = 25.0;
    p.e_total_wh[10] = 90.0;  // outside the window
    CHECK(decompose_variable_loss(p, w, 30.0, Direction::Up) == 20.0);
    CHECK(decompose_variable_loss(p, w, 30.0, Direction::Down) == 5.0);
  }

  TEST_CASE("passenger count from variable loss") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> rise(3.0, 20.0);
    std::uniform_real_distribution<double> loss(0.0, 50000.0);
    for (int trial = 0; trial < 200; ++trial) {
      for (auto dir : {Direction::Up, Direction::Down, Direction::BiDirectional}) {
        const auto m = meta_of(dir, rise(rng));
        const double ev = loss(rng);
        const double k = dir == Direction::Down ? 0.75 : 0.85;
        const double expected = ev * 3600.0 / (9.81 * m.rise_m * 75.0 * k);
        CHECK(estimate_passengers(ev, m) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(passenger_energy_wh(m) * expected == doctest::Approx(ev).epsilon(1e-9));
      }
    }
    CHECK_THROWS_AS(estimate_passengers(-1.0, meta_of(Direction::Up)), Error);
  }

  TEST_CASE("corrective events need ten in-window minutes below 5 Wh") {
    const ServiceWindow w;
    const LocalClock clock;
    auto p = flat_day(0.0);
    for (int s = w.first_slot(); s < w.end_slot(); ++s) p.e_total_wh[static_cast<std::size_t>(s)] = 30.0;
    for (int s = 300; s < 310; ++s) p.e_total_wh[static_cast<std::size_t>(s)] = 4.999;  // exactly ten
    for (int s = 400; s < 409; ++s) p.e_total_wh[static_cast<std::size_t>(s)] = 0.0;    // nine
    const auto ev = detect_events(p, w, clock);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == EventKind::Corrective);
    CHECK(ev[0].duration_min == 10);
    CHECK(ev[0].start == clock.slot_time(p.service_date, 300));

    // A reading of exactly 5 Wh counts as running.
    p.e_total_wh[305] = 5.0;
    CHECK(detect_events(p, w, clock).empty());
  }

  TEST_CASE("preventive events need ten out-of-window minutes at or above 5 Wh") {
    const ServiceWindow w;
    const LocalClock clock;
    auto p = flat_day(0.0);
    for (int s = w.first_slot(); s < w.end_slot(); ++s) p.e_total_wh[static_cast<std::size_t>(s)] = 30.0;
    for (int s = 10; s < 40; ++s) p.e_total_wh[static_cast<std::size_t>(s)] = 5.0;
    for (int s = 1300; s < 1309; ++s) p.e_total_wh[static_cast<std::size_t>(s)] = 40.0;
    auto ev = detect_events(p, w, clock);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == EventKind::Preventive);
    CHECK(ev[0].duration_min == 30);

    // A missing minute splits the run.
    p.e_total_wh[20] = std::numeric_limits<double>::quiet_NaN();
    ev = detect_events(p, w, clock);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].duration_min == 10);
    CHECK(ev[1].duration_min == 19);

    // Running across the window end does not merge with in-window minutes.
    auto q = flat_day(30.0);
    ev = detect_events(q, w, clock);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].duration_min == w.first_slot());
    CHECK(ev[1].duration_min == kMinutesPerDay - w.end_slot());
  }

  TEST_CASE("regrouping into service days") {
    const LocalClock clock;
    const Date d = parse_date("2021-10-04");
    std::vector<EnergyMinute> stream;
    for (int s = 0; s < kMinutesPerDay + 5; ++s) {
      EnergyMinute m;
      m.escalator_id = 3;
      m.timestamp = clock.slot_time(d, 0) + std::chrono::minutes{s};
      m.e_imp_wh = 10.0;
      m.e_exp_wh = 1.5;
      stream.push_back(m);
    }
    const auto days = regroup_service_days(stream, clock);
    REQUIRE(days.size() == 2);
    CHECK(days[0].missing_count() == 0);
    CHECK(days[0].e_total_wh[0] == 11.5);
    CHECK(days[1].service_date == d + std::chrono::days{1});
    CHECK(days[1].missing_count() == kMinutesPerDay - 5);

    auto dup = stream;
    dup.insert(dup.begin() + 5, dup[5]);
    CHECK_THROWS_AS(regroup_service_days(dup, clock), Error);
    auto unsorted = stream;
    std::swap(unsorted[3], unsorted[7]);
    CHECK_THROWS_AS(regroup_service_days(unsorted, clock), Error);
    auto mixed = stream;
    mixed[2].escalator_id = 4;
    CHECK_THROWS_AS(regroup_service_days(mixed, clock), Error);
  }

  TEST_CASE("days missing more than ten percent of the window are excluded") {
    const ServiceWindow w;
    DailyFeatures d;
    d.missing_window_min = 114;
    CHECK_FALSE(excluded_from_aggregation(d, w));
    d.missing_window_min = 115;
    CHECK(excluded_from_aggregation(d, w));
  }

  TEST_CASE("process_day on a synthetic upward day") {
    const auto m = meta_of(Direction::Up, 8.0);
    const LocalClock clock;
    auto p = flat_day(0.0);
    const double ef = 25.0;
    const double per_passenger = 9.81 * 8.0 * 75.0 * 0.85 / 3600.0;
    for (int s = m.service_window.first_slot(); s < m.service_window.end_slot(); ++s) {
      p.e_total_wh[static_cast<std::size_t>(s)] = ef + (s % 4 == 0 ? 3.0 * per_passenger : 0.0);
    }
    const auto f = process_day(p, m, clock);
    CHECK(f.working_min == 1140);
    CHECK(f.fixed_loss_wh_min == ef);
    CHECK(f.passengers == doctest::Approx(3.0 * 285).epsilon(1e-9));
    CHECK(f.corrective_events == 0);
    CHECK(f.preventive_events == 0);

    const auto idle = process_day(flat_day(0.0), m, clock);
    CHECK(idle.working_min == 0);
    CHECK(std::isnan(idle.fixed_loss_wh_min));
    CHECK(idle.corrective_events == 1);
  }
}
