#pragma once

#include "fuzzyburst/catalog.hpp"
#include "fuzzyburst/core.hpp"
#include "fuzzyburst/fanny.hpp"
#include "fuzzyburst/mpca.hpp"
#include "fuzzyburst/study.hpp"
#include "fuzzyburst/validity.hpp"
#include "fuzzyburst/version.hpp"
