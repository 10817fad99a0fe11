"""Evidence-grounded policy debate engine.

Subsystems: card corpus ingestion, BM25 retrieval, a chat-model gateway
with schema-constrained output, the drafter/searcher/reviewer workflow
loop, the eight-speech round pipeline, adjudication statistics, spoken
delivery, and an HTTP service that streams live round events.
"""

__version__ = "0.1.0"
