// Copyright 2026 The FaultLoom Authors.
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

// Regenerates data/demo from the synthetic study and the scripted model.
//
//   faultloom-demo-fixtures --taxonomies data/taxonomies --out data/demo

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "demo/demo.hpp"
#include "faultloom/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Regenerate the demo fixtures"};
  std::string taxonomies = "data/taxonomies";
  std::string out = "data/demo";
  app.add_option("--taxonomies", taxonomies, "Directory holding symptom.json and root_cause.json")
      ->check(CLI::ExistingDirectory);
  app.add_option("--out", out, "Fixture directory");
  CLI11_PARSE(app, argc, argv);
  try {
    faultloom::demo::write_demo_fixtures(out, taxonomies);
  } catch (const faultloom::Error& e) {
    std::cerr << "error [" << faultloom::to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}
