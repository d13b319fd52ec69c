// SPDX-License-Identifier: Apache-2.0
//
// sbce — sparse Bayesian channel estimation for pilot-assisted OFDM
// Copyright (C) 2026 the sbce contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <sbce/dictionary.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

TEST_CASE("build_delay_grid spacing and endpoints", "[dictionary]") {
    const double ts = 32.55e-9;
    const auto grid = sbce::build_delay_grid(144.0 * ts, 200);
    CHECK(grid.size() == 200);
    CHECK(grid.delays.front() == 0.0);
    CHECK(grid.delays.back() == 144.0 * ts);
    CHECK(grid.resolution == 144.0 * ts / 199.0);
    for (int i = 1; i < grid.size(); ++i)
        CHECK(grid.delays[i] - grid.delays[i - 1] ==
              Catch::Approx(grid.resolution).epsilon(1e-12));

    const auto two = sbce::build_delay_grid(1.0, 2);
    CHECK(two.delays == std::vector<double>{0.0, 1.0});

    const auto eleven = sbce::build_delay_grid(1e-6, 11);
    CHECK(eleven.delays[5] == 0.5e-6);

    CHECK_THROWS_AS(sbce::build_delay_grid(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sbce::build_delay_grid(0.0, 10), std::invalid_argument);
}

TEST_CASE("equispaced_pilots index selection", "[dictionary]") {
    const auto p = sbce::equispaced_pilots(1200, 100);
    REQUIRE(p.num_pilots() == 100);
    CHECK(p.pilot_indices.front() == 1);
    CHECK(p.pilot_indices[1] == 13);
    CHECK(p.pilot_indices.back() == 1189);
    for (int m = 1; m < 100; ++m)
        CHECK(p.pilot_indices[m] - p.pilot_indices[m - 1] == 12);

    const auto full = sbce::equispaced_pilots(8, 8);
    CHECK(full.pilot_indices == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});

    const auto single = sbce::equispaced_pilots(8, 1);
    CHECK(single.pilot_indices == std::vector<int>{1});

    CHECK_THROWS_AS(sbce::equispaced_pilots(8, 9), std::invalid_argument);
    CHECK_THROWS_AS(sbce::equispaced_pilots(8, 0), std::invalid_argument);
}

TEST_CASE("PilotPattern validation", "[dictionary]") {
    sbce::PilotPattern p;
    p.num_subcarriers = 8;
    p.pilot_indices = {1, 3, 5};
    CHECK_NOTHROW(p.validate());
    CHECK(p.frequency_of(1) == 0.0);
    CHECK(p.frequency_of(2) == 15e3);

    auto dup = p;
    dup.pilot_indices = {1, 3, 3};
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    auto unsorted = p;
    unsorted.pilot_indices = {3, 1, 5};
    CHECK_THROWS_AS(unsorted.validate(), std::invalid_argument);

    auto out_of_range = p;
    out_of_range.pilot_indices = {1, 3, 9};
    CHECK_THROWS_AS(out_of_range.validate(), std::invalid_argument);

    auto zero_based = p;
    zero_based.pilot_indices = {0, 3, 5};
    CHECK_THROWS_AS(zero_based.validate(), std::invalid_argument);
}

TEST_CASE("build_dictionary entries, dimensions and Gram diagonal", "[dictionary]") {
    const auto pattern = sbce::equispaced_pilots(1200, 100);
    const auto grid = sbce::build_delay_grid(144.0 * 32.55e-9, 200);
    const auto pilots = sbce::build_dictionary(pattern, grid, sbce::DictionaryRows::pilots_only);
    const auto full =
        sbce::build_dictionary(pattern, grid, sbce::DictionaryRows::all_subcarriers);

    REQUIRE(pilots.matrix.rows() == 100);
    REQUIRE(pilots.matrix.cols() == 200);
    REQUIRE(full.matrix.rows() == 1200);
    REQUIRE(full.matrix.cols() == 200);

    // unit modulus everywhere
    CHECK((pilots.matrix.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK((full.matrix.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);

    // zero-delay column is the all-ones vector
    CHECK((pilots.matrix.col(0).array() - 1.0).abs().maxCoeff() == 0.0);

    // Gram diagonal equals the pilot count
    for (int k = 0; k < 200; ++k)
        CHECK(std::abs(pilots.matrix.col(k).squaredNorm() - 100.0) < 1e-10);

    // the pilot dictionary is the row restriction of the full one
    for (int m = 0; m < 100; ++m) {
        const int row = pattern.pilot_indices[m] - 1;
        CHECK((pilots.matrix.row(m) - full.matrix.row(row)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("dictionary phase convention", "[dictionary]") {
    // subcarrier 2 at 15 kHz spacing against a one-sample delay
    sbce::PilotPattern p;
    p.num_subcarriers = 2;
    p.pilot_indices = {2};
    const auto grid = sbce::build_delay_grid(32.55e-9, 2);
    const auto dict = sbce::build_dictionary(p, grid, sbce::DictionaryRows::pilots_only);
    const double expected_phase = -2.0 * std::numbers::pi * 15e3 * 32.55e-9;
    CHECK(std::arg(dict.matrix(0, 1)) == Catch::Approx(expected_phase).margin(1e-15));
    CHECK(expected_phase == Catch::Approx(-3.0677e-3).epsilon(1e-4));
}
