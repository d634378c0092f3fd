/*
Copyright 2026 the congested-crowds authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crowd {

/// Command-line driver, callable in-process for tests. Grammar:
///   crowdsim <verb> <scenario.cfg> [scenario2.cfg] [-o DIR] [flags]
/// with verbs simulate, project, cone-project, contract-w2, contract-l1,
/// verify-lemmas, convergence. --section.key=value overrides scenario keys;
/// verdict-bearing verbs end with "VERDICT: PASS|FAIL max_slack=<x>".
/// Exit codes: 0 success/verdict-pass, 1 verdict-fail, 2 usage or input
/// error, 3 runtime failure. CONGESTED_CROWD_THREADS caps worker threads.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crowd
