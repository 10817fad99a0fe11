"""Gateway behavior: retries, rate limiting, structured-output totality."""

import json
import threading

import pytest
from hypothesis import given, settings, strategies as st

from debatesim.gateway import (
    AuthMissing,
    ChatMessage,
    CompletionResult,
    Gateway,
    HttpChatProvider,
    MockProvider,
    ModelProfile,
    ProviderError,
    SchemaSpec,
    SchemaViolation,
    ScriptedProvider,
    ScriptExhausted,
    Timeout,
    extract_json,
)

PROFILE = ModelProfile(provider="mock", model_name="scripted")
USER = [ChatMessage("user", "hello there")]

SIMPLE_SCHEMA = SchemaSpec(
    {
        "type": "object",
        "required": ["answer"],
        "properties": {"answer": {"type": "string", "minLength": 1}},
        "additionalProperties": False,
    }
)


def make_gateway(script, **kwargs):
    kwargs.setdefault("sleep", lambda _: None)
    return Gateway(providers={"mock": MockProvider(script)}, **kwargs)


class TestMessages:
    def test_roles_validated(self):
        with pytest.raises(ValueError):
            ChatMessage("narrator", "hi")

    def test_empty_user_content_rejected(self):
        with pytest.raises(ValueError):
            ChatMessage("user", "")

    def test_assistant_may_be_empty(self):
        assert ChatMessage("assistant", "").content == ""


class TestComplete:
    def test_scripted_response(self):
        gw = make_gateway(["hello"])
        assert gw.complete(PROFILE, USER).text == "hello"

    def test_fail_twice_then_succeed_within_budget(self):
        gw = make_gateway([Timeout("t1"), Timeout("t2"), "ok"], retry_attempts=3)
        result = gw.complete(PROFILE, USER)
        assert result.text == "ok"
        assert result.attempts == 3

    def test_budget_exhausted_raises_last_transient(self):
        gw = make_gateway([Timeout("t")] * 3, retry_attempts=3)
        with pytest.raises(Timeout):
            gw.complete(PROFILE, USER)

    def test_non_transient_not_retried(self):
        gw = make_gateway([ProviderError("bad request"), "never"], retry_attempts=3)
        with pytest.raises(ProviderError):
            gw.complete(PROFILE, USER)
        assert gw.calls == 1

    def test_empty_messages_rejected(self):
        with pytest.raises(ValueError):
            make_gateway(["x"]).complete(PROFILE, [])

    def test_backoff_is_exponential(self):
        delays = []
        gw = make_gateway([Timeout("a"), Timeout("b"), "ok"], backoff_base=1.0, sleep=delays.append)
        gw.complete(PROFILE, USER)
        assert delays == [1.0, 2.0]

    def test_auth_missing_before_any_network_call(self, monkeypatch):
        monkeypatch.delenv("OPENAI_API_KEY", raising=False)
        provider = HttpChatProvider("openai")
        # no network: AuthMissing must fire before a request is attempted
        with pytest.raises(AuthMissing):
            provider.complete(ModelProfile(provider="openai", model_name="gpt-x"), USER)


class TestMockProvider:
    def test_consumed_in_order_then_exhausted(self):
        provider = MockProvider(["a", "b"])
        assert provider.complete(PROFILE, USER).text == "a"
        assert provider.complete(PROFILE, USER).text == "b"
        with pytest.raises(ScriptExhausted):
            provider.complete(PROFILE, USER)

    def test_empty_script_rejected(self):
        with pytest.raises(ValueError):
            MockProvider([])


class TestScriptedProvider:
    def test_exact_route_wins_over_pattern(self):
        provider = ScriptedProvider({"*/drafter": "generic", "1AC/harms/1/drafter": "specific"})
        out = provider.complete(PROFILE, USER, route="1AC/harms/1/drafter")
        assert out.text == "specific"
        out = provider.complete(PROFILE, USER, route="1NC/oncase/1/drafter")
        assert out.text == "generic"

    def test_object_responses_serialized(self):
        provider = ScriptedProvider({"r": {"approved": True, "critique": ""}})
        assert json.loads(provider.complete(PROFILE, USER, route="r").text) == {
            "approved": True,
            "critique": "",
        }

    def test_missing_route(self):
        provider = ScriptedProvider({"a": "x"})
        with pytest.raises(ScriptExhausted):
            provider.complete(PROFILE, USER, route="b")

    def test_scripted_error(self):
        provider = ScriptedProvider({"boom": {"$error": "provider"}})
        with pytest.raises(ProviderError):
            provider.complete(PROFILE, USER, route="boom")

    def test_routes_are_reusable(self):
        provider = ScriptedProvider({"r": "same"})
        for _ in range(3):
            assert provider.complete(PROFILE, USER, route="r").text == "same"


class TestStructured:
    def test_valid_first_try(self):
        gw = make_gateway(['{"answer": "yes"}'])
        result = gw.complete_structured(PROFILE, USER, SIMPLE_SCHEMA, repair_budget=2)
        assert result.value == {"answer": "yes"}
        assert result.attempt_count == 1

    def test_invalid_then_valid_with_budget_one(self):
        gw = make_gateway(['{"wrong": 1}', '{"answer": "fixed"}'])
        result = gw.complete_structured(PROFILE, USER, SIMPLE_SCHEMA, repair_budget=1)
        assert result.value == {"answer": "fixed"}
        assert result.attempt_count == 2
        assert result.attempts[0].errors

    def test_always_invalid_records_all_attempts(self):
        gw = make_gateway(["nonsense"] * 3)
        with pytest.raises(SchemaViolation) as exc:
            gw.complete_structured(PROFILE, USER, SIMPLE_SCHEMA, repair_budget=2)
        assert len(exc.value.attempts) == 3

    def test_repair_message_carries_validator_errors(self):
        seen = []

        class Spy(MockProvider):
            def complete(self, profile, messages, route=None):
                seen.append(list(messages))
                return super().complete(profile, messages, route)

        gw = Gateway(providers={"mock": Spy(['{"answer": ""}', '{"answer": "ok"}'])}, sleep=lambda _: None)
        gw.complete_structured(PROFILE, USER, SIMPLE_SCHEMA, repair_budget=1)
        repair = seen[1][-1]
        assert repair.role == "user"
        assert "failed validation" in repair.content
        assert "answer" in repair.content

    def test_markdown_fence_tolerated(self):
        gw = make_gateway(['```json\n{"answer": "fenced"}\n```'])
        result = gw.complete_structured(PROFILE, USER, SIMPLE_SCHEMA)
        assert result.value == {"answer": "fenced"}

    def test_usage_accounting_sums_attempts(self):
        gw = make_gateway(["one two three", '{"answer": "four"}'])
        result = gw.complete_structured(PROFILE, USER, SIMPLE_SCHEMA, repair_budget=1)
        prompt, completion = result.total_usage
        assert completion == sum(a.completion.completion_tokens for a in result.attempts)
        assert prompt == sum(a.completion.prompt_tokens for a in result.attempts)
        assert completion > 0 and prompt > 0

    def test_negative_budget_rejected(self):
        with pytest.raises(ValueError):
            make_gateway(["x"]).complete_structured(PROFILE, USER, SIMPLE_SCHEMA, repair_budget=-1)


class TestRateLimit:
    def test_inflight_never_exceeds_rate_limit(self):
        limit = 3
        profile = ModelProfile(provider="mock", model_name="m", rate_limit=limit)

        class Instrumented:
            def __init__(self):
                self.inflight = 0
                self.peak = 0
                self.lock = threading.Lock()
                self.gate = threading.Event()

            def complete(self, profile, messages, route=None):
                with self.lock:
                    self.inflight += 1
                    self.peak = max(self.peak, self.inflight)
                self.gate.wait(0.05)
                with self.lock:
                    self.inflight -= 1
                return CompletionResult(text="ok")

        provider = Instrumented()
        gw = Gateway(providers={"mock": provider}, sleep=lambda _: None)
        threads = [threading.Thread(target=gw.complete, args=(profile, USER)) for _ in range(12)]
        for t in threads:
            t.start()
        provider.gate.set()
        for t in threads:
            t.join()
        assert provider.peak <= limit


class TestExtractJson:
    @pytest.mark.parametrize(
        "text",
        ['{"a": 1}', '  {"a": 1}  ', '```json\n{"a": 1}\n```', '```\n{"a": 1}\n```'],
    )
    def test_accepted_forms(self, text):
        assert extract_json(text) == {"a": 1}

    def test_invalid(self):
        with pytest.raises(json.JSONDecodeError):
            extract_json("not json")


# -- totality property ------------------------------------------------------

_outputs = st.one_of(
    st.builds(lambda s: json.dumps({"answer": s}), st.text(min_size=1, max_size=10)),  # valid
    st.builds(lambda s: json.dumps({"answer": s}), st.just("")),  # schema-invalid
    st.builds(lambda v: json.dumps({"other": v}), st.integers()),  # schema-invalid
    st.text(max_size=12),  # usually malformed JSON
)


@settings(max_examples=120, deadline=None)
@given(outputs=st.lists(_outputs, min_size=1, max_size=4), budget=st.integers(min_value=0, max_value=3))
def test_structured_totality(outputs, budget):
    script = outputs + ["__pad__"] * (budget + 1)
    gw = make_gateway(script)
    try:
        result = gw.complete_structured(PROFILE, USER, SIMPLE_SCHEMA, repair_budget=budget)
    except SchemaViolation as exc:
        assert len(exc.attempts) == budget + 1
        for attempt in exc.attempts:
            assert attempt.errors
    else:
        assert SIMPLE_SCHEMA.validation_errors(result.value) == []
        assert 1 <= result.attempt_count <= budget + 1
        # every non-final attempt failed, the final one validated
        for attempt in result.attempts[:-1]:
            assert attempt.errors
        assert result.attempts[-1].errors == []
