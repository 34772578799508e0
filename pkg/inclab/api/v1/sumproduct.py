"""Sum-product harness endpoints."""
from fastapi import APIRouter, Depends
from inclab.schemas.sweep import SumProductRequest, SumProductResponse
from inclab.services.sumproduct_service import SumProductService
from inclab.dependencies import get_sumproduct_service

router = APIRouter(prefix="/sumproduct", tags=["Sum-product"])


@router.post("", response_model=SumProductResponse)
def run_sumproduct(
    request: SumProductRequest,
    sumproduct_service: SumProductService = Depends(get_sumproduct_service)
):
    result, structural, run = sumproduct_service.run(request)
    return sumproduct_service.to_response(result, structural, run)
