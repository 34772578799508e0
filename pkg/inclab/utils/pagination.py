"""Paging for ledger listings."""
from typing import Generic, Sequence, TypeVar

from pydantic import BaseModel


T = TypeVar("T")


def page_window(page: int, page_size: int) -> tuple[int, int]:
    """(skip, limit) for a 1-based page."""
    return (page - 1) * page_size, page_size


class PaginatedResponse(BaseModel, Generic[T]):
    items: list[T]
    total: int
    page: int
    page_size: int
    total_pages: int
    has_next: bool

    @classmethod
    def create(cls, items: Sequence[T], total: int, page: int, page_size: int) -> "PaginatedResponse[T]":
        total_pages = -(-total // page_size) if page_size > 0 else 0
        return cls(
            items=list(items), total=total, page=page, page_size=page_size,
            total_pages=total_pages, has_next=page < total_pages,
        )
