// Copyright 2026 The regcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <ostream>

#include "cli.h"
#include "commands.h"
#include "regcal/cohort_io.h"
#include "regcal/error.h"
#include "regcal/scenario_io.h"
#include "regcal/table.h"

namespace regcal::cli {

int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
  try {
    Scenario sc = load_scenario(o.scenario, parse_beta1_source(o.beta1_source));
    if (o.n_cohort_set) sc.n_cohort = o.n_cohort;
    if (o.n_substudy_set) sc.n_substudy = o.n_substudy;
    if (o.n_reliability_set) sc.n_reliability = o.n_reliability;
    // Shrinking the cohort alone keeps the default nesting feasible.
    if (o.n_cohort_set && !o.n_substudy_set) sc.n_substudy = std::min(sc.n_substudy, sc.n_cohort);
    if (!o.n_reliability_set) sc.n_reliability = std::min(sc.n_reliability, sc.n_substudy);
    validate(sc);
    resolve_lambda0(sc, o.lambda0, o.seed);

    // Same stream as replication 0 of `simulate` with this seed.
    RngStream stream = RngStream(o.seed, 0).child(0);
    const Cohort cohort = generate_cohort(sc, stream);
    write_cohort_csv(o.out, cohort);
    out << "wrote " << cohort.rows.size() << " rows (" << cohort.substudy_size()
        << " sub-study, " << cohort.reliability_size() << " with repeat) to "
        << o.out << "; lambda0 = " << format_double(sc.lambda0)
        << ", censoring " << cohort.censoring_fraction() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "regcal generate: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace regcal::cli
