#pragma once

#include "granul/analytics.hpp"
#include "granul/budget.hpp"
#include "granul/bytes.hpp"
#include "granul/core.hpp"
#include "granul/corpus.hpp"
#include "granul/errors.hpp"
#include "granul/lexical.hpp"
#include "granul/model_io.hpp"
#include "granul/subword.hpp"
#include "granul/tokenizer.hpp"
