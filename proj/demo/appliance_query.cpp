// Loads the home fixture, runs the 6 pm appliance-status query and prints
// the result table followed by the commands the reasoner would send.

#include <iostream>

#include "homectx/homectx.hpp"

int main() {
    using namespace homectx;

    TripleStore store(load_data_file(HOMECTX_DATA_DIR "/home_fixture.ttl"));
    const TimeOfDay six_pm{18, 0, 0};

    std::cout << format_results(evaluate(store, parse_query(appliance_query_text(six_pm)))) << '\n';
    for (const ApplianceCommand& c : reason_at(store, six_pm)) std::cout << wire::encode(c) << '\n';
}
