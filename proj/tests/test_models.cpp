#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "curio/errors.hpp"
#include "curio/experience_db.hpp"
#include "curio/rng.hpp"

using namespace curio;
using models::ExperienceDB;
using models::KnnIndex;
using models::SchemaLayout;

namespace {

SchemaLayout two_entity_layout() {
    SchemaLayout l;
    l.action_dim = 3;
    l.entities = {{"hand", 2}, {"ball", 2}};
    l.outcome_diameter = 4.0;
    return l;
}

Outcome make_outcome(double hx, double hy, double bx, double by) {
    Outcome o;
    o.entities["hand"] = {hx, hy};
    o.entities["ball"] = {bx, by};
    return o;
}

ActionParams make_action(std::initializer_list<double> v) {
    ActionParams a;
    a.values = v;
    return a;
}

// Brute-force reference: indices of the k nearest points, ties by index.
std::vector<std::size_t> brute_knn(const std::vector<std::vector<double>>& pts,
                                   const std::vector<double>& q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < q.size(); ++d) {
            const double diff = pts[i][d] - q[d];
            d2 += diff * diff;
        }
        dist.emplace_back(d2, i);
    }
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, dist.size()); ++i) out.push_back(dist[i].second);
    return out;
}

} // namespace

TEST_CASE("knn index equals brute force, including duplicates and the tree path") {
    RngStream rng(13, "knn");
    for (std::size_t dim : {2u, 4u}) {
        KnnIndex index(dim);
        std::vector<std::vector<double>> pts;
        const std::size_t n = 1600; // crosses the linear threshold and a rebuild
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> p(dim);
            if (i % 7 == 0 && i > 0) {
                p = pts[rng.uniform_index(i)]; // exact duplicate to exercise ties
            } else {
                for (auto& v : p) v = 0.25 * static_cast<double>(rng.uniform_index(9));
            }
            index.add(p);
            pts.push_back(p);
        }
        REQUIRE(index.size() == n);
        for (int rep = 0; rep < 150; ++rep) {
            std::vector<double> q(dim);
            for (auto& v : q) v = rng.uniform(-0.5, 2.5);
            if (rep % 3 == 0) q = pts[rng.uniform_index(n)]; // query a stored point
            for (std::size_t k : {1u, 3u, 10u}) {
                CHECK(index.nearest(q, k) == brute_knn(pts, q, k));
            }
        }
    }
}

TEST_CASE("add_datapoint maintains indices and validates schema") {
    ExperienceDB db(two_entity_layout());
    CHECK(db.empty());
    db.add(make_action({0.1, 0.2, 0.3}), make_outcome(0.5, 0.5, 1.0, 1.0));
    CHECK(db.size() == 1);
    CHECK(db.space_index_size("hand") == 1);
    CHECK(db.space_index_size("ball") == 1);

    // Nearest query at the stored projection returns that point.
    CHECK(db.nearest_in_space({0.5, 0.5}, "hand") == 0);

    CHECK_THROWS_AS(db.add(make_action({0.1, 0.2}), make_outcome(0, 0, 0, 0)), SchemaError);
    Outcome missing;
    missing.entities["hand"] = {0.0, 0.0};
    CHECK_THROWS_AS(db.add(make_action({0.1, 0.2, 0.3}), missing), SchemaError);
}

TEST_CASE("predict averages the k nearest outcomes") {
    ExperienceDB db(two_entity_layout());
    CHECK_THROWS_AS(db.predict(make_action({0, 0, 0}), 1), ModelUnavailableError);

    db.add(make_action({0.5, 0.5, 0.5}), make_outcome(0.1, 0.2, 0.3, 0.4));
    auto p = db.predict(make_action({-0.9, 0.0, 0.9}), 1);
    CHECK(p.entities == make_outcome(0.1, 0.2, 0.3, 0.4).entities);
    p = db.predict(make_action({-0.9, 0.0, 0.9}), 10); // k truncated to db size
    CHECK(p.entities == make_outcome(0.1, 0.2, 0.3, 0.4).entities);

    RngStream rng(17, "predict");
    ExperienceDB big(two_entity_layout());
    std::vector<std::vector<double>> actions;
    std::vector<Outcome> outcomes;
    for (int i = 0; i < 100; ++i) {
        ActionParams a;
        for (int d = 0; d < 3; ++d) a.values.push_back(rng.uniform(-1.0, 1.0));
        const Outcome o =
            make_outcome(rng.uniform(), rng.uniform(), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        big.add(a, o);
        actions.push_back(a.values);
        outcomes.push_back(o);
    }
    for (int rep = 0; rep < 50; ++rep) {
        ActionParams q;
        for (int d = 0; d < 3; ++d) q.values.push_back(rng.uniform(-1.0, 1.0));
        const auto neighbours = brute_knn(actions, q.values, 3);
        Outcome expected = make_outcome(0, 0, 0, 0);
        for (auto idx : neighbours)
            for (auto& [id, v] : expected.entities)
                for (std::size_t d = 0; d < v.size(); ++d) v[d] += outcomes[idx].at(id)[d] / 3.0;
        const auto predicted = big.predict(q, 3);
        for (const auto& [id, v] : expected.entities)
            for (std::size_t d = 0; d < v.size(); ++d)
                CHECK(predicted.at(id)[d] == doctest::Approx(v[d]).epsilon(1e-12));
    }

    // Memorized points are exact with k = 1.
    for (int i = 0; i < 100; ++i) {
        ActionParams q;
        q.values = actions[static_cast<std::size_t>(i)];
        CHECK(big.predict(q, 1).entities == outcomes[static_cast<std::size_t>(i)].entities);
    }
}

TEST_CASE("prediction_error is a normalized metric") {
    ExperienceDB db(two_entity_layout());
    const auto a = make_outcome(0.1, 0.2, 0.3, 0.4);
    CHECK(db.prediction_error(a, a) == 0.0);

    // One concatenated pattern spanning the declared diameter.
    const auto zero = make_outcome(0, 0, 0, 0);
    const auto far = make_outcome(2.0, 2.0, 2.0, 2.0); // norm 4 = diameter
    CHECK(db.prediction_error(zero, far) == doctest::Approx(1.0));

    RngStream rng(3, "perr");
    for (int rep = 0; rep < 50; ++rep) {
        const auto x = make_outcome(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform());
        const auto y = make_outcome(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform());
        CHECK(db.prediction_error(x, y) == db.prediction_error(y, x));
        CHECK(db.prediction_error(x, y) >= 0.0);
        CHECK((db.prediction_error(x, y) == 0.0) == (x.entities == y.entities));
    }

    Outcome wrong;
    wrong.entities["hand"] = {0.0};
    wrong.entities["ball"] = {0.0, 0.0};
    CHECK_THROWS_AS(db.prediction_error(a, wrong), SchemaError);
}

TEST_CASE("infer_action retrieves and perturbs the nearest producer") {
    ExperienceDB db(two_entity_layout());
    RngStream rng(5, "infer");
    CHECK_THROWS_AS(db.infer_action({0.0, 0.0}, "ball", 0.0, rng), ModelUnavailableError);

    std::vector<std::vector<double>> projections;
    std::vector<std::vector<double>> actions;
    for (int i = 0; i < 200; ++i) {
        ActionParams a;
        for (int d = 0; d < 3; ++d) a.values.push_back(rng.uniform(-1.0, 1.0));
        const Outcome o =
            make_outcome(rng.uniform(), rng.uniform(), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        db.add(a, o);
        projections.push_back(o.at("ball"));
        actions.push_back(a.values);
    }

    // sigma = 0 at a stored projection: exactly that action.
    CHECK(db.infer_action(projections[42], "ball", 0.0, rng).values == actions[42]);

    // sigma = 0 at arbitrary goals: action of the brute-force nearest projection.
    for (int rep = 0; rep < 50; ++rep) {
        const std::vector<double> goal{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const auto expected = actions[brute_knn(projections, goal, 1)[0]];
        CHECK(db.infer_action(goal, "ball", 0.0, rng).values == expected);
    }

    // Huge sigma stays clamped to [-1, 1].
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = db.infer_action({0.0, 0.0}, "ball", 10.0, rng);
        for (double v : a.values) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }

    CHECK_THROWS_AS(db.infer_action({0.0, 0.0}, "nope", 0.0, rng), SchemaError);
    CHECK_THROWS_AS(db.infer_action({0.0, 0.0}, "ball", -1.0, rng), DomainError);
}
